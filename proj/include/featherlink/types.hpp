#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace featherlink {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ArrayX = Eigen::ArrayXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

using Bits = std::vector<std::uint8_t>;

/// A k-bit source word, or its k2-bit coded form. `index` is the MSB-first
/// integer value of `bits`; it is what one-hot mode transmits.
struct MessageBlock {
    Bits bits;
    std::uint32_t index = 0;
};

inline std::uint32_t bits_to_index(const Bits& bits) {
    std::uint32_t v = 0;
    for (auto b : bits) v = (v << 1) | (b & 1u);
    return v;
}

inline Bits index_to_bits(std::uint32_t index, int k) {
    Bits out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = (index >> (k - 1 - i)) & 1u;
    return out;
}

inline MessageBlock make_block(std::uint32_t index, int k) {
    return MessageBlock{index_to_bits(index, k), index};
}

}  // namespace featherlink
