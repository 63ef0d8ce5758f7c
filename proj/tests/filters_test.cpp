#include "oracles.hpp"

#include "dpfbmc/filters.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace dpfbmc;

namespace {

double energy(const ProtoFilter& f) {
    return std::inner_product(f.taps.begin(), f.taps.end(), f.taps.begin(), 0.0);
}

double max_asymmetry(const ProtoFilter& f) {
    double worst = 0.0;
    const std::size_t L = f.length();
    for (std::size_t i = 0; i < L; ++i)
        worst = std::max(worst, std::abs(f.taps[i] - f.taps[L - 1 - i]));
    return worst;
}

// Magnitudes for p = 0..2 (rows) and q = 0..3 (cols) of the K = 4 prototypes,
// NaN where the reference value is not used (see decisions ledger).
struct RefTable {
    FilterKind kind;
    double alpha;
    double tol;
    double mag[3][4];
};

const double nan_ = std::nan("");

const RefTable kRefs[] = {
    {FilterKind::IOTA, 0.0, 5e-3, {{1.0, 0.4380, 0.0, 0.0194}, {0.4378, 0.2327, 0.0413, 0.0116}, {0.0, 0.0413, 0.0, 0.0}}},
    {FilterKind::PHYDYAS, 0.0, 2e-3, {{1.0, 0.5645, 0.0, nan_}, {0.2393, 0.2058, 0.1250, 0.0442}, {0.0, 0.0, 0.0, 0.0}}},
    {FilterKind::SRRC, 0.5, 2e-3, {{1.0, 0.6015, nan_, nan_}, {0.1589, 0.15, nan_, nan_}, {0.0, 0.0, 0.0, nan_}}},
};

} // namespace

TEST_CASE("prototype filters satisfy length, energy and symmetry") {
    for (auto kind : {FilterKind::IOTA, FilterKind::PHYDYAS, FilterKind::SRRC})
        for (std::size_t M : {16u, 64u, 512u}) {
            const ProtoFilter f = make_filter(kind, 4, M, 0.5);
            CAPTURE(to_string(kind));
            CAPTURE(M);
            CHECK(f.length() == 4 * M);
            CHECK(std::abs(energy(f) - 1.0) < 1e-12);
            CHECK(max_asymmetry(f) < 1e-9);
        }
    const ProtoFilter s8 = make_srrc(8, 512, 0.25);
    CHECK(s8.length() == 4096);
    CHECK(std::abs(energy(s8) - 1.0) < 1e-12);
}

TEST_CASE("filter factories reject unsupported parameters") {
    CHECK_THROWS_AS(make_phydyas(3, 512), ParameterError);
    CHECK_THROWS_AS(make_iota(8, 512), ParameterError);
    CHECK_THROWS_AS(make_srrc(4, 512, 1.5), ParameterError);
    CHECK_THROWS_AS(make_srrc(4, 512, 0.0), ParameterError);
    CHECK_THROWS_AS(make_srrc(1, 512, 0.5), ParameterError);
    CHECK_THROWS_AS(make_phydyas(4, 500), ParameterError);
    CHECK(filter_kind_from_string("srrc") == FilterKind::SRRC);
    CHECK_THROWS_AS(filter_kind_from_string("hann"), ParameterError);
}

TEST_CASE("phydyas taps follow the frequency-sampling coefficients") {
    // h(t) = P0 + 2 sum_k (-1)^k P_k cos(2 pi k t / (K T)), P = {1, .97196, 1/sqrt2, .235147}
    const std::size_t M = 64;
    const ProtoFilter f = make_phydyas(4, M);
    const double P[4] = {1.0, 0.97195983, 1.0 / std::sqrt(2.0), 0.23514695};
    std::vector<double> h(4 * M);
    double e = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double t = static_cast<double>(k) + 0.5;
        double v = P[0];
        for (int i = 1; i < 4; ++i)
            v += 2.0 * ((i & 1) ? -1.0 : 1.0) * P[i] * std::cos(2.0 * M_PI * i * t / (4.0 * M));
        h[k] = v;
        e += v * v;
    }
    for (std::size_t k = 0; k < h.size(); ++k)
        CHECK(f.taps[k] == doctest::Approx(h[k] / std::sqrt(e)).epsilon(1e-6));
}

TEST_CASE("ambiguity equals the brute-force inner product of explicit translates") {
    for (auto kind : {FilterKind::IOTA, FilterKind::PHYDYAS, FilterKind::SRRC}) {
        const ProtoFilter f = make_filter(kind, 4, 32, 0.5);
        for (int p = -2; p <= 2; ++p)
            for (int q = -3; q <= 3; ++q) {
                const auto ref = oracle::brute_ambiguity(f, p, q);
                const auto got = ambiguity(f, p, q);
                CAPTURE(p);
                CAPTURE(q);
                CHECK(std::abs(got - ref) < 1e-12);
            }
    }
}

TEST_CASE("coupling from reference half-symbol m picks up (-1)^{p m}") {
    const ProtoFilter f = make_phydyas(4, 32);
    for (long m0 : {4L, 5L})
        for (int p = -1; p <= 1; ++p)
            for (int q = -2; q <= 2; ++q) {
                const auto ref = oracle::brute_ambiguity(f, p, q, 3, m0);
                const double sign = ((p & 1) && (m0 & 1)) ? -1.0 : 1.0;
                CHECK(std::abs(ref - sign * ambiguity(f, p, q)) < 1e-12);
            }
}

TEST_CASE("ambiguity table invariants") {
    for (auto kind : {FilterKind::IOTA, FilterKind::PHYDYAS, FilterKind::SRRC}) {
        const auto t = interference_table(make_filter(kind, 4, 512, 0.5), 2, 3);
        CAPTURE(to_string(kind));
        CHECK(std::abs(t(0, 0) - 1.0) < 1e-9);
        for (int p = -2; p <= 2; ++p)
            for (int q = -3; q <= 3; ++q) {
                const double sign = ((p * q) & 1) ? -1.0 : 1.0;
                CHECK(std::abs(t(-p, -q) - sign * std::conj(t(p, q))) < 1e-9);
                CHECK(std::abs(std::abs(t(-p, -q)) - std::abs(t(p, q))) < 1e-12);
            }
    }
    CHECK_THROWS_AS(interference_table(make_phydyas(4, 64), 0, 1), ParameterError);
}

TEST_CASE("real orthogonality of the translates") {
    for (auto kind : {FilterKind::IOTA, FilterKind::PHYDYAS, FilterKind::SRRC}) {
        const double tol = kind == FilterKind::SRRC ? 5e-3 : 1e-3;
        const auto t = interference_table(make_filter(kind, 4, 512, 0.5), 2, 3);
        for (int p = -2; p <= 2; ++p)
            for (int q = -3; q <= 3; ++q) {
                const double expect = (p == 0 && q == 0) ? 1.0 : 0.0;
                CHECK(std::abs(t(p, q).real() - expect) < tol);
            }
    }
}

TEST_CASE("interference magnitudes against reference tables") {
    for (const auto& ref : kRefs) {
        const auto t = interference_table(make_filter(ref.kind, 4, 512, ref.alpha), 2, 3);
        CAPTURE(to_string(ref.kind));
        for (int p = 0; p <= 2; ++p)
            for (int q = 0; q <= 3; ++q) {
                const double want = ref.mag[p][q];
                if (std::isnan(want))
                    continue;
                CAPTURE(p);
                CAPTURE(q);
                // Both signs of q and the mirrored p share the magnitude.
                CHECK(std::abs(std::abs(t(p, q)) - want) <= ref.tol);
                CHECK(std::abs(std::abs(t(p, -q)) - want) <= ref.tol);
            }
    }
}

TEST_CASE("interference signs on the nearest neighbours") {
    // -j <v00, vpq> is real; its sign pattern around the reference cell.
    const auto t = interference_table(make_phydyas(4, 512), 1, 1);
    auto v = [&](int p, int q) { return (Complex{0, -1} * t(p, q)).real(); };
    CHECK(v(0, 1) < 0);
    CHECK(v(0, -1) > 0);
    CHECK(v(1, 0) < 0);
    CHECK(v(-1, 0) > 0);
    CHECK(v(1, 1) > 0);
    CHECK(v(-1, -1) > 0);
    CHECK(v(0, 1) == doctest::Approx(-0.5645).epsilon(2e-3));
}

TEST_CASE("zero entries of the tables") {
    CHECK(std::abs(ambiguity(make_phydyas(4, 512), 2, -1)) < 1e-4);
    CHECK(std::abs(ambiguity(make_iota(4, 512), -2, -2)) < 5e-3);
    for (auto kind : {FilterKind::IOTA, FilterKind::PHYDYAS, FilterKind::SRRC}) {
        const ProtoFilter f = make_filter(kind, 4, 512, 0.5);
        CHECK(std::abs(ambiguity(f, 0, 0) - Complex{1.0, 0.0}) < 1e-9);
        CHECK(std::abs(ambiguity(f, 0, 2).imag()) < 1e-12);
    }
}

TEST_CASE("residual same-polarization interference shrinks with multiplexing") {
    for (auto kind : {FilterKind::IOTA, FilterKind::PHYDYAS, FilterKind::SRRC}) {
        const ProtoFilter f = make_filter(kind, 4, 512, 0.5);
        const double conv = residual_interference_power(f, StructureId::Conventional, 2, 3);
        for (auto s : {StructureId::TPDM, StructureId::FPDM, StructureId::TFPDM})
            CHECK(residual_interference_power(f, s, 2, 3) < conv);
        // Independent sum over the table.
        const auto t = interference_table(f, 2, 3);
        double sum = 0.0;
        for (int p = -2; p <= 2; ++p)
            for (int q = -3; q <= 3; ++q)
                if ((p != 0 || q != 0) && ((p + q) % 2 == 0))
                    sum += std::norm(t(p, q));
        CHECK(residual_interference_power(f, StructureId::TFPDM, 2, 3) == doctest::Approx(sum).epsilon(1e-12));
    }
}
