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

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace deepris {

using cd = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

/// Unit-average-energy square QAM alphabet. Point i carries the label formed
/// by the binary digits of i, most significant bit first.
struct Constellation {
    int order = 0;
    int bits_per_symbol = 0;
    std::vector<cd> points;
    /// Largest per-axis coordinate magnitude over all points.
    double amplitude_bound = 0.0;
};

/// Only order 4 is supported. Gray labels: 00 -> (+1+j), 01 -> (+1-j),
/// 10 -> (-1+j), 11 -> (-1-j), all scaled by 1/sqrt(2).
Constellation build_constellation(int order);

/// Throws NumericError if bits.size() is not a multiple of bits_per_symbol.
std::vector<cd> modulate(std::span<const std::uint8_t> bits, const Constellation& c);

/// Index of the nearest point; ties go to the lowest index.
int nearest_index(cd symbol, const Constellation& c);

/// Appends the label of point `index` to `out`.
void append_label(int index, const Constellation& c, Bits& out);

Bits demodulate_hard(std::span<const cd> symbols, const Constellation& c);

}  // namespace deepris
