#pragma once

#include "dpfbmc/common.hpp"
#include "dpfbmc/lattice.hpp"

#include <string_view>

namespace dpfbmc {

enum class FilterKind { IOTA, PHYDYAS, SRRC };

std::string_view to_string(FilterKind k);
FilterKind filter_kind_from_string(std::string_view text);

/// Sampled prototype filter h[k], k = 0..K*M-1, with M samples per symbol
/// period T0. Unit energy and symmetric about (K*M-1)/2.
struct ProtoFilter {
    FilterKind kind = FilterKind::PHYDYAS;
    int K = 4;
    std::size_t M = 0;
    double alpha = 0.0; ///< SRRC roll-off, 0 for the others
    RVec taps;

    std::size_t length() const { return taps.size(); }
    /// Centre of symmetry in samples; the modulation phase is referenced here.
    double centre() const { return (static_cast<double>(taps.size()) - 1.0) / 2.0; }
};

/// Frequency-sampling design, K = 4 only.
ProtoFilter make_phydyas(int K, std::size_t M);

/// Square-root raised cosine at symbol period T0, truncated to K*M samples.
ProtoFilter make_srrc(int K, std::size_t M, double alpha);

/// Orthogonalised Gaussian (IOTA, alpha = 1), truncated to K*M samples, K = 4 only.
ProtoFilter make_iota(int K, std::size_t M);

/// Builds any of the three; alpha is only read for SRRC.
ProtoFilter make_filter(FilterKind kind, int K, std::size_t M, double alpha = 0.0);

/// Raw inner product <v_{0,0}, v_{p,q}> between the reference translate and the
/// translate p subcarriers and q half-symbols away, with
///   v_{n,m}[k] = h[k - m M/2] e^{j2pi n (k - D)/M} j^{n+m},  D = centre().
/// Off-diagonal values are purely imaginary for an orthogonal prototype.
/// The value seen from a reference at half-symbol m picks up (-1)^{p m}.
Complex ambiguity(const ProtoFilter& f, int p, int q);

/// ambiguity() over p in [-dp, dp], q in [-dq, dq].
class AmbiguityTable {
  public:
    AmbiguityTable() = default;
    AmbiguityTable(int dp, int dq);

    int dp() const { return dp_; }
    int dq() const { return dq_; }
    Complex operator()(int p, int q) const { return values_[index(p, q)]; }
    Complex& at(int p, int q) { return values_[index(p, q)]; }
    bool contains(int p, int q) const;

  private:
    std::size_t index(int p, int q) const;

    int dp_ = 0;
    int dq_ = 0;
    CVec values_;
};

AmbiguityTable interference_table(const ProtoFilter& f, int dp, int dq);

/// Sum of |ambiguity|^2 over the window, (0,0) excluded, keeping only offsets on
/// the reference cell's polarization.
double residual_interference_power(const ProtoFilter& f, StructureId s, int dp, int dq);

} // namespace dpfbmc
