#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "featherlink/rng.hpp"
#include "featherlink/types.hpp"

namespace featherlink {

enum class ChannelKind { Awgn, Rayleigh };

std::string channel_kind_name(ChannelKind k);
ChannelKind channel_kind_from_name(const std::string& name);

/// Noise bookkeeping. The Eb/N0 mapping assumes unit average symbol power
/// (Es = 1) and rate R = 2k/n information bits per complex channel use, so
/// the per-real-component noise variance is 1 / (2 R 10^(ebno_db/10)).
double ebno_to_noise_std(double ebno_db, int k, int n);

struct ChannelSpec {
    ChannelKind kind = ChannelKind::Awgn;
    double ebno_db = 0.0;
    int k = 0;        // information bits per block
    int n = 0;        // real transmitter outputs per block
    double noise_std = 0.0;
    std::uint64_t rng_seed = 0;

    static ChannelSpec make(ChannelKind kind, double ebno_db, int k, int n, std::uint64_t rng_seed = 0);
};

/// Per-block flat fading coefficient, h ~ CN(0, 1).
struct FadingDraw {
    Complex h{1.0, 0.0};
};

FadingDraw draw_fading(Rng& rng);

/// y = x + w with w i.i.d. Gaussian(0, noise_std^2) on each of I and Q.
ComplexVector awgn_apply(const ComplexVector& x, double noise_std, Rng& rng);

/// Batched form on interleaved I/Q reals, one block per column.
Matrix awgn_apply(const Matrix& x, double noise_std, Rng& rng);

/// y = h x + w with one h per block, constant across the block's symbols.
std::pair<ComplexVector, FadingDraw> rayleigh_apply(const ComplexVector& x, double noise_std, Rng& rng);

/// Batched form; column b is scaled by fading[b] then noise is added.
Matrix rayleigh_apply(const Matrix& x, double noise_std, Rng& rng, std::vector<FadingDraw>& fading);

/// VJP of the fading product on interleaved I/Q reals: upstream pairs are
/// rotated by conj(h). h and the noise are constants during backprop.
Matrix rayleigh_backward(const Matrix& dy, const std::vector<FadingDraw>& fading);

}  // namespace featherlink
