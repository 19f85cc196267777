/*
   Copyright 2026 The DeepRIS Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "deepris/channel.hpp"
#include "deepris/error.hpp"
#include "test_util.hpp"

namespace deepris {
namespace {

constexpr double kPi = std::numbers::pi;

// Sum of |h_{d,i}| |(H_s v)_i|, evaluated element by element.
double magnitude_sum(const ChannelRealization& ch, const Eigen::VectorXcd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < ch.elements(); ++i) {
        cd incident = 0.0;
        for (Eigen::Index m = 0; m < ch.antennas(); ++m) incident += ch.source_to_ris(i, m) * v[m];
        s += std::abs(ch.ris_to_dest[i]) * std::abs(incident);
    }
    return s;
}

cd effective(const ChannelRealization& ch, const PhaseConfig& phases, const Eigen::VectorXcd& v) {
    return (cascaded_row(ch, phases) * v).value();
}

Beamformer unit_beam(Eigen::Index m) { return {Eigen::VectorXcd::Ones(m), static_cast<double>(m)}; }

TEST(SampleChannel, RayleighUnitPower) {
    Rng rng(1);
    const Eigen::MatrixXcd h = sample_channel(1000, 100, FadingModel::rayleigh(), rng);
    EXPECT_NEAR(h.cwiseAbs2().mean(), 1.0, 0.02);
    EXPECT_NEAR(std::abs(h.mean()), 0.0, 0.01);
}

TEST(SampleChannel, NakagamiOneMatchesRayleighCdf) {
    Rng rng(2);
    const Eigen::MatrixXcd h = sample_channel(100000, 1, FadingModel::nakagami(1.0, 1.0), rng);
    std::vector<double> r(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) r[i] = std::abs(h(i, 0));
    std::sort(r.begin(), r.end());
    const double n = static_cast<double>(r.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double cdf = 1.0 - std::exp(-r[i] * r[i]);  // Rayleigh with E r^2 = 1
        ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01);
}

TEST(SampleChannel, NakagamiSpreadIsMeanPower) {
    Rng rng(3);
    const Eigen::MatrixXcd h = sample_channel(100000, 1, FadingModel::nakagami(1.0, 2.0), rng);
    EXPECT_NEAR(h.cwiseAbs2().mean(), 2.0, 0.05);
    EXPECT_DOUBLE_EQ(FadingModel::nakagami(1.0, 2.0).mean_power(), 2.0);
}

TEST(SampleChannel, InvalidParameters) {
    Rng rng(4);
    EXPECT_THROW(sample_channel(2, 2, FadingModel::nakagami(0.3, 1.0), rng), ConfigError);
    EXPECT_THROW(sample_channel(2, 2, FadingModel::nakagami(1.0, 0.0), rng), ConfigError);
    EXPECT_THROW(sample_channel(0, 2, FadingModel::rayleigh(), rng), NumericError);
}

TEST(SampleChannel, DeterministicGivenSeed) {
    Rng a(99), b(99);
    EXPECT_EQ(sample_channel(8, 3, FadingModel::nakagami(2.0, 1.5), a),
              sample_channel(8, 3, FadingModel::nakagami(2.0, 1.5), b));
}

TEST(Pathloss, Values) {
    EXPECT_DOUBLE_EQ(pathloss(1.0), 0.01);
    EXPECT_NEAR(pathloss(10.0), 1e-2 * std::pow(10.0, -3.75), 1e-20);
    EXPECT_NEAR(pathloss(10.0), 1.778e-6, 1e-9);
    EXPECT_DOUBLE_EQ(PathlossConfig{}.gain(), 1.0);
    EXPECT_DOUBLE_EQ((PathlossConfig{false, 1.0}.gain()), 0.01);
    EXPECT_THROW(pathloss(0.0), NumericError);
    EXPECT_THROW(pathloss(-1.0), NumericError);
}

TEST(PhaseMatrix, Examples) {
    EXPECT_TRUE(build_phase_matrix(PhaseConfig::unit(3)).isApprox(Eigen::MatrixXcd::Identity(3, 3)));
    PhaseConfig flip = PhaseConfig::unit(3);
    flip.angles.setConstant(kPi);
    EXPECT_TRUE(build_phase_matrix(flip).isApprox(-Eigen::MatrixXcd::Identity(3, 3), 1e-15));
    PhaseConfig two = PhaseConfig::unit(2);
    two.angles[1] = kPi / 2;
    const Eigen::MatrixXcd phi = build_phase_matrix(two);
    EXPECT_NEAR(std::abs(phi(0, 0) - cd(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(phi(1, 1) - cd(0, 1)), 0.0, 1e-15);
    EXPECT_EQ(phi(0, 1), cd(0, 0));
    EXPECT_EQ(phi(1, 0), cd(0, 0));
}

TEST(Cophase, AllOnesGivesN) {
    const ChannelRealization ch = unit_realization(4, 1);
    const PhaseConfig p = cophase(ch, unit_beam(1));
    EXPECT_NEAR(std::abs(effective(ch, p, Eigen::VectorXcd::Ones(1))), 4.0, 1e-12);
}

TEST(Cophase, MatchesMagnitudeSumOracle) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ch = sample_realization(16, 1, FadingModel::rayleigh(), 1.0, rng);
        const Beamformer v = unit_beam(1);
        const cd g = effective(ch, cophase(ch, v), v.weights);
        EXPECT_NEAR(std::abs(g), magnitude_sum(ch, v.weights), 1e-10);
        EXPECT_NEAR(g.imag(), 0.0, 1e-10);
        EXPECT_GT(g.real(), 0.0);
    }
}

TEST(Cophase, MultiAntennaMagnitudeSum) {
    Rng rng(6);
    const auto ch = sample_realization(12, 5, FadingModel::rayleigh(), 1.0, rng);
    Beamformer v{Eigen::VectorXcd(5), 1.0};
    for (Eigen::Index m = 0; m < 5; ++m) v.weights[m] = complex_normal(rng);
    EXPECT_NEAR(std::abs(effective(ch, cophase(ch, v), v.weights)), magnitude_sum(ch, v.weights), 1e-10);
}

TEST(Cophase, OptimalAgainstRandomConfigs) {
    Rng rng(7);
    const Beamformer v = unit_beam(1);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto ch = sample_realization(16, 1, FadingModel::rayleigh(), 1.0, rng);
        const double best = std::abs(effective(ch, cophase(ch, v), v.weights));
        for (int k = 0; k < 100; ++k) {
            if (std::abs(effective(ch, random_phases(16, rng), v.weights)) > best + 1e-12) ++violations;
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(GainMoments, ClosedForm) {
    const auto [m1, v1] = gain_moments(1);
    EXPECT_DOUBLE_EQ(m1, kPi / 4);
    EXPECT_DOUBLE_EQ(v1, 1 - kPi * kPi / 16);
    const auto [m64, v64] = gain_moments(64);
    EXPECT_NEAR(m64, 50.265, 1e-3);
    EXPECT_NEAR(v64, 24.52, 1e-2);
    EXPECT_THROW(gain_moments(0), NumericError);
}

TEST(GainMoments, MonteCarloMatches) {
    Rng rng(8);
    const int trials = 100000;
    const Beamformer v = unit_beam(1);
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto ch = sample_realization(64, 1, FadingModel::rayleigh(), 1.0, rng);
        const double a = std::abs(effective(ch, cophase(ch, v), v.weights));
        sum += a;
        sum2 += a * a;
    }
    const double mean = sum / trials;
    const double var = (sum2 - trials * mean * mean) / (trials - 1);
    const auto [em, ev] = gain_moments(64);
    EXPECT_NEAR(mean / em, 1.0, 0.01);
    EXPECT_NEAR(var / ev, 1.0, 0.05);
}

TEST(GainMoments, PhaseUnknownPenaltySlopes) {
    Rng rng(9);
    const Beamformer v = unit_beam(1);
    const std::vector<int> sizes{4, 16, 64};
    std::vector<double> lx, lr, lc;
    for (int n : sizes) {
        double random_sq = 0.0, cophased_sq = 0.0;
        const int trials = 20000;
        for (int t = 0; t < trials; ++t) {
            const auto ch = sample_realization(n, 1, FadingModel::rayleigh(), 1.0, rng);
            random_sq += std::norm(effective(ch, random_phases(n, rng), v.weights));
            cophased_sq += std::norm(effective(ch, cophase(ch, v), v.weights));
        }
        lx.push_back(std::log(static_cast<double>(n)));
        lr.push_back(std::log(random_sq / trials));
        lc.push_back(std::log(cophased_sq / trials));
    }
    auto slope = [&](const std::vector<double>& y) {
        const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (y[0] + y[1] + y[2]) / 3;
        double num = 0, den = 0;
        for (int i = 0; i < 3; ++i) {
            num += (lx[i] - mx) * (y[i] - my);
            den += (lx[i] - mx) * (lx[i] - mx);
        }
        return num / den;
    };
    EXPECT_NEAR(slope(lr), 1.0, 0.15);
    EXPECT_NEAR(slope(lc), 2.0, 0.15);
}

TEST(Mrt, ScalarCase) {
    ChannelRealization ch = unit_realization(1, 1);
    ch.source_to_ris(0, 0) = cd(0.6, 0.8);
    const PhaseConfig p = PhaseConfig::unit(1);
    const Beamformer b = mrt_beamformer(ch, p, 2.0);
    const cd g = cascaded_row(ch, p)(0);
    EXPECT_NEAR(std::abs(b.weights[0] - std::sqrt(2.0) * std::polar(1.0, -std::arg(g))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(g * b.weights[0]), std::sqrt(2.0) * std::abs(g), 1e-12);
}

TEST(Mrt, PowerAndOptimality) {
    Rng rng(10);
    const auto ch = sample_realization(16, 32, FadingModel::rayleigh(), 1.0, rng);
    const PhaseConfig p = random_phases(16, rng);
    const Beamformer b = mrt_beamformer(ch, p, 1.5);
    EXPECT_NEAR(b.weights.squaredNorm(), 1.5, 1e-12);
    const double best = std::norm(effective(ch, p, b.weights));
    for (int k = 0; k < 1000; ++k) {
        Eigen::VectorXcd u(32);
        for (Eigen::Index m = 0; m < 32; ++m) u[m] = complex_normal(rng);
        u *= std::sqrt(1.5) / u.norm();
        EXPECT_GE(best + 1e-9, std::norm(effective(ch, p, u)));
    }
}

TEST(Mrt, ZeroChannelThrows) {
    ChannelRealization ch = unit_realization(2, 2);
    ch.ris_to_dest.setZero();
    EXPECT_THROW(mrt_beamformer(ch, PhaseConfig::unit(2), 1.0), NumericError);
}

TEST(OptimizeSingleUser, ReachesCophasedMrt) {
    Rng rng(11);
    const auto ch = sample_realization(16, 4, FadingModel::rayleigh(), 1.0, rng);
    const auto [phases, v] = optimize_single_user(ch, 1.0);
    const cd g = effective(ch, phases, v.weights);
    EXPECT_NEAR(std::abs(g), magnitude_sum(ch, v.weights), 1e-10);
    EXPECT_NEAR(v.weights.squaredNorm(), 1.0, 1e-12);
    // At least as good as co-phasing a uniform beam alone.
    Beamformer uniform{Eigen::VectorXcd::Constant(4, cd(0.5, 0.0)), 1.0};
    EXPECT_GE(std::abs(g) + 1e-12, std::abs(effective(ch, cophase(ch, uniform), uniform.weights)));
}

TEST(Transmit, IdentityCascade) {
    const ChannelRealization ch = unit_realization(1, 1);
    const Beamformer b{Eigen::VectorXcd::Ones(1), 1.0};
    Eigen::MatrixXcd x(1, 1);
    x(0, 0) = 1.0;
    Rng rng(0);
    const Eigen::VectorXcd y = transmit(ch, PhaseConfig::unit(1), std::span(&b, 1), x, NoiseModel{0.0}, rng);
    ASSERT_EQ(y.size(), 1);
    EXPECT_EQ(y[0], cd(1.0, 0.0));
}

// Naive triple loop over h_d, Phi, H_s and the beamformers.
Eigen::VectorXcd dense_oracle(const ChannelRealization& ch, const PhaseConfig& p, const std::vector<Beamformer>& beams,
                              const Eigen::MatrixXcd& x) {
    const Eigen::VectorXcd phi = p.coefficients();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.cols());
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
        for (Eigen::Index m = 0; m < ch.antennas(); ++m) {
            cd s = 0.0;
            for (std::size_t j = 0; j < beams.size(); ++j) s += beams[j].weights[m] * x(static_cast<Eigen::Index>(j), t);
            for (Eigen::Index i = 0; i < ch.elements(); ++i) {
                y[t] += ch.ris_to_dest[i] * std::conj(phi[i]) * ch.source_to_ris(i, m) * s;
            }
        }
        y[t] *= std::sqrt(ch.pathloss_gain);
    }
    return y;
}

TEST(Transmit, MatchesDenseOracle) {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ch = sample_realization(9, 3, FadingModel::rayleigh(), 0.37, rng);
        PhaseConfig p = random_phases(9, rng);
        for (Eigen::Index i = 0; i < 9; ++i) p.amplitudes[i] = uniform_real(rng, 0.2, 1.0);
        std::vector<Beamformer> beams(2);
        for (auto& b : beams) {
            b.weights.resize(3);
            for (Eigen::Index m = 0; m < 3; ++m) b.weights[m] = complex_normal(rng);
        }
        Eigen::MatrixXcd x(2, 7);
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = complex_normal(rng);
        const Eigen::VectorXcd y = transmit(ch, p, beams, x, NoiseModel{0.0}, rng);
        const Eigen::VectorXcd want = dense_oracle(ch, p, beams, x);
        EXPECT_LT((y - want).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Transmit, SuperpositionIsExact) {
    Rng rng(13);
    const auto ch = sample_realization(8, 4, FadingModel::rayleigh(), 1.0, rng);
    const PhaseConfig p = random_phases(8, rng);
    const Beamformer b = mrt_beamformer(ch, p, 1.0);
    Eigen::MatrixXcd x1(1, 16), x2(1, 16);
    for (Eigen::Index k = 0; k < 16; ++k) {
        x1(k) = complex_normal(rng);
        x2(k) = complex_normal(rng);
    }
    const cd a(0.3, -1.2), c(-2.0, 0.5);
    const NoiseModel quiet{0.0};
    const auto y1 = transmit(ch, p, std::span(&b, 1), x1, quiet, rng);
    const auto y2 = transmit(ch, p, std::span(&b, 1), x2, quiet, rng);
    const auto y12 = transmit(ch, p, std::span(&b, 1), (a * x1 + c * x2).eval(), quiet, rng);
    EXPECT_LT((y12 - (a * y1 + c * y2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transmit, NoiseOnlyVariance) {
    Rng rng(14);
    const ChannelRealization ch = unit_realization(4, 2);
    const Beamformer b{Eigen::VectorXcd::Ones(2), 2.0};
    const Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(1, 100000);
    const auto y = transmit(ch, PhaseConfig::unit(4), std::span(&b, 1), x, NoiseModel{0.7}, rng);
    EXPECT_NEAR(y.cwiseAbs2().mean() / 0.7, 1.0, 0.02);
    EXPECT_NEAR(std::abs(y.mean()), 0.0, 0.01);
}

TEST(Transmit, DimensionErrors) {
    Rng rng(15);
    const ChannelRealization ch = unit_realization(4, 2);
    const Beamformer wrong{Eigen::VectorXcd::Ones(3), 1.0};
    const Eigen::MatrixXcd x = Eigen::MatrixXcd::Ones(1, 4);
    EXPECT_THROW(transmit(ch, PhaseConfig::unit(4), std::span(&wrong, 1), x, NoiseModel{0.0}, rng), NumericError);
    const Beamformer ok{Eigen::VectorXcd::Ones(2), 1.0};
    const Eigen::MatrixXcd two_rows = Eigen::MatrixXcd::Ones(2, 4);
    EXPECT_THROW(transmit(ch, PhaseConfig::unit(4), std::span(&ok, 1), two_rows, NoiseModel{0.0}, rng),
                 NumericError);
    EXPECT_THROW(transmit(ch, PhaseConfig::unit(3), std::span(&ok, 1), x, NoiseModel{0.0}, rng), NumericError);
}

TEST(ReceivedSnr, SingleUser) {
    Rng rng(16);
    const auto ch = sample_realization(8, 1, FadingModel::rayleigh(), 1.0, rng);
    const Beamformer v = unit_beam(1);
    const PhaseConfig p = cophase(ch, v);
    const double a = magnitude_sum(ch, v.weights);
    EXPECT_NEAR(received_snr(ch, p, std::span(&v, 1), 0, 0.25), a * a / 0.25, 1e-9 * a * a);
}

TEST(ReceivedSnr, PinnedTwoUserInterference) {
    ChannelRealization ch;
    ch.source_to_ris = Eigen::MatrixXcd::Identity(2, 2);
    ch.ris_to_dest = Eigen::VectorXcd::Ones(2);
    Eigen::VectorXcd w(2);
    w << 1.0, 0.0;
    const std::vector<Beamformer> beams{{w, 1.0}, {w, 1.0}};
    // g = [1, 1], g v = 1 for both beams: 1 / (1 + 0.5).
    EXPECT_NEAR(received_snr(ch, PhaseConfig::unit(2), beams, 0, 0.5), 2.0 / 3.0, 1e-15);
    EXPECT_LT(received_snr(ch, PhaseConfig::unit(2), beams, 0, 0.5), 1.0);
    EXPECT_THROW(received_snr(ch, PhaseConfig::unit(2), beams, 2, 0.5), NumericError);
    EXPECT_THROW(received_snr(ch, PhaseConfig::unit(2), std::span(beams.data(), 1), 0, 0.0), NumericError);
}

}  // namespace
}  // namespace deepris
