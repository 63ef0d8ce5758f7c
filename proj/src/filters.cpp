#include "dpfbmc/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace dpfbmc {
namespace {

void check_m(std::size_t M) {
    if (!is_power_of_two(M) || M < 4)
        throw ParameterError("M must be a power of two >= 4, got " + std::to_string(M));
}

void normalise(RVec& taps) {
    const double e = std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
    const double s = 1.0 / std::sqrt(e);
    for (auto& t : taps)
        t *= s;
}

// Fold the two halves onto each other so rounding never breaks the symmetry.
void symmetrise(RVec& taps) {
    const std::size_t n = taps.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double v = 0.5 * (taps[i] + taps[n - 1 - i]);
        taps[i] = v;
        taps[n - 1 - i] = v;
    }
}

double root_raised_cosine(double t, double alpha) {
    if (std::abs(t) < 1e-12)
        return 1.0 - alpha + 4.0 * alpha / kPi;
    const double edge = 1.0 / (4.0 * alpha);
    if (std::abs(std::abs(t) - edge) < 1e-9) {
        const double a = kPi / (4.0 * alpha);
        return alpha / std::sqrt(2.0) *
               ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * t * (1.0 - alpha)) + 4.0 * alpha * t * std::cos(kPi * t * (1.0 + alpha));
    const double den = kPi * t * (1.0 - 16.0 * alpha * alpha * t * t);
    return num / den;
}

double gaussian(double t) { return std::pow(2.0, 0.25) * std::exp(-kPi * t * t); }

} // namespace

std::string_view to_string(FilterKind k) {
    switch (k) {
    case FilterKind::IOTA: return "iota";
    case FilterKind::PHYDYAS: return "phydyas";
    case FilterKind::SRRC: return "srrc";
    }
    return "?";
}

FilterKind filter_kind_from_string(std::string_view text) {
    if (text == "iota") return FilterKind::IOTA;
    if (text == "phydyas") return FilterKind::PHYDYAS;
    if (text == "srrc") return FilterKind::SRRC;
    throw ParameterError("unknown filter '" + std::string(text) + "'");
}

ProtoFilter make_phydyas(int K, std::size_t M) {
    if (K != 4)
        throw ParameterError("PHYDYAS prototype is only defined here for K = 4");
    check_m(M);
    // Frequency samples P_0..P_3 of the K = 4 design.
    static constexpr double P[4] = {1.0, 0.971960, 0.70710678118654752, 0.235147};

    ProtoFilter f{FilterKind::PHYDYAS, K, M, 0.0, RVec(K * M)};
    const double L = static_cast<double>(K * M);
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
        // Half-sample offset centres the KM samples on the continuous pulse.
        const double t = static_cast<double>(k) + 0.5;
        double v = P[0];
        for (int i = 1; i < K; ++i)
            v += 2.0 * ((i % 2) ? -1.0 : 1.0) * P[i] * std::cos(2.0 * kPi * i * t / L);
        f.taps[k] = v;
    }
    symmetrise(f.taps);
    normalise(f.taps);
    return f;
}

ProtoFilter make_srrc(int K, std::size_t M, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError("SRRC roll-off must lie in (0, 1], got " + std::to_string(alpha));
    if (K < 2)
        throw ParameterError("overlapping factor must be >= 2");
    check_m(M);

    ProtoFilter f{FilterKind::SRRC, K, M, alpha, RVec(K * M)};
    const double centre = (static_cast<double>(K * M) - 1.0) / 2.0;
    for (std::size_t k = 0; k < f.taps.size(); ++k)
        f.taps[k] = root_raised_cosine((static_cast<double>(k) - centre) / static_cast<double>(M), alpha);
    symmetrise(f.taps);
    normalise(f.taps);
    return f;
}

ProtoFilter make_iota(int K, std::size_t M) {
    if (K != 4)
        throw ParameterError("IOTA prototype is only supported for K = 4");
    check_m(M);

    // Isotropic lattice: tau0 = nu0 = 1/sqrt(2), so T0 = 2 tau0 = sqrt(2).
    const double nu0 = 1.0 / std::sqrt(2.0);
    const double tau0 = nu0;
    const double T0 = 2.0 * tau0;

    // Frequency orthogonalisation: Y(f) = G(f) / sqrt(nu0 sum_k G(f - k nu0)^2).
    // The divisor is nu0-periodic; expand it in a cosine series b_c so that
    // y(t) = sum_c b_c g(t + c/nu0) (the Gaussian is its own transform).
    constexpr int kSamples = 2048;
    constexpr int kTerms = 40;
    RVec periodic(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        const double fr = nu0 * i / kSamples;
        double s = 0.0;
        for (int k = -kTerms; k <= kTerms; ++k) {
            const double g = gaussian(fr - k * nu0);
            s += g * g;
        }
        periodic[i] = 1.0 / std::sqrt(nu0 * s);
    }
    RVec b(kTerms + 1);
    for (int c = 0; c <= kTerms; ++c) {
        double acc = 0.0;
        for (int i = 0; i < kSamples; ++i)
            acc += periodic[i] * std::cos(2.0 * kPi * c * i / kSamples);
        b[c] = acc / kSamples;
    }
    auto y = [&](double t) {
        double v = b[0] * gaussian(t);
        for (int c = 1; c <= kTerms; ++c)
            v += b[c] * (gaussian(t + c / nu0) + gaussian(t - c / nu0));
        return v;
    };

    // Time orthogonalisation: z(t) = y(t) / sqrt(tau0 sum_k y(t - k tau0)^2).
    ProtoFilter f{FilterKind::IOTA, K, M, 1.0, RVec(K * M)};
    const double centre = (static_cast<double>(K * M) - 1.0) / 2.0;
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
        const double t = (static_cast<double>(k) - centre) * T0 / static_cast<double>(M);
        double s = 0.0;
        for (int i = -kTerms; i <= kTerms; ++i) {
            const double v = y(t - i * tau0);
            s += v * v;
        }
        f.taps[k] = y(t) / std::sqrt(tau0 * s);
    }
    symmetrise(f.taps);
    normalise(f.taps);
    return f;
}

ProtoFilter make_filter(FilterKind kind, int K, std::size_t M, double alpha) {
    switch (kind) {
    case FilterKind::IOTA: return make_iota(K, M);
    case FilterKind::PHYDYAS: return make_phydyas(K, M);
    case FilterKind::SRRC: return make_srrc(K, M, alpha);
    }
    throw ParameterError("unknown filter kind");
}

Complex ambiguity(const ProtoFilter& f, int p, int q) {
    const auto L = static_cast<long>(f.length());
    const long shift = static_cast<long>(q) * static_cast<long>(f.M) / 2;
    const double D = f.centre();
    const double w = -2.0 * kPi * p / static_cast<double>(f.M);

    Complex acc{0.0, 0.0};
    const long lo = std::max(0L, shift);
    const long hi = std::min(L, L + shift);
    for (long k = lo; k < hi; ++k) {
        const double prod = f.taps[k] * f.taps[k - shift];
        acc += prod * std::polar(1.0, w * (static_cast<double>(k) - D));
    }
    return acc * std::conj(phase(p, q));
}

AmbiguityTable::AmbiguityTable(int dp, int dq)
    : dp_(dp), dq_(dq), values_(static_cast<std::size_t>((2 * dp + 1) * (2 * dq + 1))) {
    if (dp < 0 || dq < 0)
        throw ParameterError("table window must be non-negative");
}

bool AmbiguityTable::contains(int p, int q) const { return std::abs(p) <= dp_ && std::abs(q) <= dq_; }

std::size_t AmbiguityTable::index(int p, int q) const {
    if (!contains(p, q))
        throw ParameterError("ambiguity offset outside table");
    return static_cast<std::size_t>((p + dp_) * (2 * dq_ + 1) + (q + dq_));
}

AmbiguityTable interference_table(const ProtoFilter& f, int dp, int dq) {
    if (dp < 1 || dq < 1)
        throw ParameterError("interference table needs dp >= 1 and dq >= 1");
    AmbiguityTable t(dp, dq);
    for (int p = -dp; p <= dp; ++p)
        for (int q = -dq; q <= dq; ++q)
            t.at(p, q) = ambiguity(f, p, q);
    return t;
}

double residual_interference_power(const ProtoFilter& f, StructureId s, int dp, int dq) {
    const auto mask = same_pol_mask(s, dp, dq);
    double acc = 0.0;
    for (int p = -dp; p <= dp; ++p)
        for (int q = -dq; q <= dq; ++q)
            if ((p != 0 || q != 0) && mask(p, q))
                acc += std::norm(ambiguity(f, p, q));
    return acc;
}

} // namespace dpfbmc
