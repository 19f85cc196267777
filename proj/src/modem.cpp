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

#include "deepris/modem.hpp"

#include <cmath>
#include <string>

#include "deepris/error.hpp"

namespace deepris {

Constellation build_constellation(int order) {
    if (order != 4) {
        throw ConfigError("modulation", "unsupported modulation order " + std::to_string(order) +
                                            " (only 4-QAM is supported)");
    }
    const double a = 1.0 / std::sqrt(2.0);
    Constellation c;
    c.order = 4;
    c.bits_per_symbol = 2;
    // First bit selects the sign of the real part, second bit the imaginary part.
    c.points = {cd(a, a), cd(a, -a), cd(-a, a), cd(-a, -a)};
    c.amplitude_bound = a;
    return c;
}

std::vector<cd> modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
    const auto k = static_cast<std::size_t>(c.bits_per_symbol);
    if (k == 0 || bits.size() % k != 0) {
        throw NumericError("modulate: bit count " + std::to_string(bits.size()) +
                           " is not a multiple of " + std::to_string(k));
    }
    std::vector<cd> out;
    out.reserve(bits.size() / k);
    for (std::size_t i = 0; i < bits.size(); i += k) {
        int index = 0;
        for (std::size_t b = 0; b < k; ++b) index = (index << 1) | (bits[i + b] & 1);
        out.push_back(c.points[static_cast<std::size_t>(index)]);
    }
    return out;
}

int nearest_index(cd symbol, const Constellation& c) {
    int best = 0;
    double best_d = std::norm(symbol - c.points[0]);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const double d = std::norm(symbol - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

void append_label(int index, const Constellation& c, Bits& out) {
    for (int b = c.bits_per_symbol - 1; b >= 0; --b) {
        out.push_back(static_cast<std::uint8_t>((index >> b) & 1));
    }
}

Bits demodulate_hard(std::span<const cd> symbols, const Constellation& c) {
    Bits out;
    out.reserve(symbols.size() * static_cast<std::size_t>(c.bits_per_symbol));
    for (cd s : symbols) append_label(nearest_index(s, c), c, out);
    return out;
}

}  // namespace deepris
