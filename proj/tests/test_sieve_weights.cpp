#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "sievelab/arith.hpp"
#include "sievelab/sieve_weights.hpp"

using namespace sievelab;

TEST_CASE("brun weights: truncation order and support") {
    const SieveWeights w = build_weights(10.0, 10000.0, {}, Parity::upper, Construction::brun);
    CHECK(w.trunc_order == 4);  // largest even t with 10^t <= 10^4
    CHECK(w.range_primes == std::vector<uint64_t>{2, 3, 5, 7});
    CHECK(w.count_q == 16);  // all subsets of {2,3,5,7}
    REQUIRE(w.materialized);
    // xi_1 = 1 and xi_6 = mu(6) = 1
    bool found1 = false, found6 = false;
    for (const auto& [q, xi] : w.support) {
        if (q == 1) {
            found1 = true;
            CHECK(xi == 1);
        }
        if (q == 6) {
            found6 = true;
            CHECK(xi == 1);
        }
    }
    CHECK(found1);
    CHECK(found6);
}

TEST_CASE("support invariants: squarefree, smooth, coprime to exclusions, below y") {
    for (Construction c : {Construction::brun, Construction::beta}) {
        std::vector<uint64_t> excl{2};
        const SieveWeights w = build_weights(30.0, 30.0 * 30.0 * 30.0, excl, Parity::upper, c);
        for (const auto& [q, xi] : w.support) {
            CHECK(std::abs(int(xi)) <= 1);
            CHECK(double(q) < w.y);
            CHECK(q % 2 != 0);  // exclusion respected
            int omega = 0;
            for (const auto& [p, e] : factorize(q)) {
                if (q > 1) CHECK(double(p) < w.z);
                CHECK(e == 1);  // squarefree
                ++omega;
            }
            CHECK(int(xi) == ((omega % 2 == 0) ? 1 : -1));  // xi_q = mu(q)
        }
    }
}

TEST_CASE("build validation") {
    CHECK_THROWS_AS(build_weights(10.0, 5.0, {}, Parity::upper, Construction::brun),
                    std::invalid_argument);  // y < z
    CHECK_THROWS_AS(build_weights(1.0, 10.0, {}, Parity::upper, Construction::brun),
                    std::invalid_argument);  // z < 2
    std::vector<uint64_t> bad{4};
    CHECK_THROWS_AS(build_weights(10.0, 100.0, bad, Parity::upper, Construction::brun),
                    std::invalid_argument);  // non-prime exclusion
}

TEST_CASE("theta point values") {
    const SieveWeights w = build_weights(10.0, 10000.0, {}, Parity::upper, Construction::brun);
    CHECK(theta(1, w) == 1.0);
    CHECK(theta(11 * 13, w) == 1.0);  // coprime to P(z)
    for (uint64_t p : {2, 3, 5, 7}) CHECK(theta(p, w) == 0.0);  // 1 + mu(p)
    const ArithWindow win = build_table(20000);
    const auto table = theta_table(w, 20000, 2);
    for (uint64_t m = 1; m <= 20000; ++m) {
        CHECK(double(table[m]) == theta(m, w));
        CHECK(table[m] <= int32_t(win.tau_at(m)));
    }
}

TEST_CASE("theta nonnegativity scans") {
    SUBCASE("brun") {
        const SieveWeights w =
            build_weights(10.0, 10000.0, {}, Parity::upper, Construction::brun);
        CHECK(verify_theta_nonneg(w, 100000, 2).empty());
        CHECK(verify_theta_nonneg(w, 1).empty());
    }
    SUBCASE("beta") {
        const SieveWeights w = build_weights(30.0, std::pow(30.0, 9.0), {}, Parity::upper,
                                             Construction::beta);
        CHECK(verify_theta_nonneg(w, 100000, 2).empty());
    }
    SUBCASE("lower parity rejected") {
        const SieveWeights w =
            build_weights(10.0, 10000.0, {}, Parity::lower, Construction::brun);
        CHECK_THROWS_AS(verify_theta_nonneg(w, 100), std::invalid_argument);
    }
}

TEST_CASE("upper/lower sandwich around the coprimality indicator") {
    for (Construction c : {Construction::brun, Construction::beta}) {
        for (double z : {10.0, 30.0}) {
            const double y = std::pow(z, 4.0);
            const SieveWeights up = build_weights(z, y, {}, Parity::upper, c);
            const SieveWeights lo = build_weights(z, y, {}, Parity::lower, c);
            const uint64_t n = 20000;
            const auto tu = theta_table(up, n);
            const auto tl = theta_table(lo, n);
            const auto ind = coprime_indicator(up, n);
            for (uint64_t m = 1; m <= n; ++m) {
                CHECK(tl[m] <= int32_t(ind[m]));
                CHECK(int32_t(ind[m]) <= tu[m]);
            }
        }
    }
}

TEST_CASE("sifting identity: sum of upper theta vs coprime count") {
    for (double z : {10.0, 30.0}) {
        const SieveWeights w =
            build_weights(z, std::pow(z, 4.0), {}, Parity::upper, Construction::brun);
        const uint64_t n = 100000;
        const auto t = theta_table(w, n);
        const auto ind = coprime_indicator(w, n);
        int64_t sum_theta = 0;
        int64_t count = 0;
        for (uint64_t m = 1; m <= n; ++m) {
            sum_theta += t[m];
            count += ind[m];
        }
        CHECK(sum_theta >= count);
        CHECK(double(sum_theta) < 5.0 * double(count));
    }
}

TEST_CASE("monotonicity probe") {
    const SieveWeights w =
        build_weights(10.0, 10000.0, {}, Parity::upper, Construction::brun);
    SUBCASE("b = 1 keeps everything fixed") {
        const MonotonicityProbe p = theta_monotonicity_probe(30, 1, w);
        CHECK(p.lhs == p.rhs);
        CHECK(p.holds);
    }
    SUBCASE("a = 1, b a sifted prime") {
        const MonotonicityProbe p = theta_monotonicity_probe(1, 5, w);
        CHECK(p.lhs == 0.0);
        CHECK(p.rhs == 1.0);
        CHECK(p.holds);
    }
    SUBCASE("sweep reports the violation fraction") {
        for (Construction c : {Construction::brun, Construction::beta}) {
            const SieveWeights ws = build_weights(10.0, 10000.0, {}, Parity::upper, c);
            int violations = 0, total = 0;
            for (uint64_t a = 1; a <= 60; ++a)
                for (uint64_t b = 1; b <= 60; ++b) {
                    ++total;
                    if (!theta_monotonicity_probe(a, b, ws).holds) ++violations;
                }
            MESSAGE("construction ", c == Construction::brun ? "brun" : "beta",
                    ": monotonicity violations ", violations, " of ", total);
            CHECK(violations <= total);
        }
    }
}

TEST_CASE("lower truncation stays odd and level y = z works") {
    const SieveWeights w = build_weights(10.0, 10.0, {}, Parity::lower, Construction::brun);
    CHECK(w.trunc_order == 1);
    CHECK(!w.degenerate);
    const SieveWeights u = build_weights(10.0, 10.0, {}, Parity::upper, Construction::brun);
    CHECK(u.trunc_order == 0);  // theta == 1: trivial upper bound
    CHECK(u.count_q == 1);
}

TEST_CASE("streaming enumeration matches the materialized support") {
    const SieveWeights w = build_weights(30.0, std::pow(30.0, 3.0), {}, Parity::upper,
                                         Construction::beta);
    std::vector<std::pair<uint64_t, int>> seen;
    for_each_weight(w, [&](uint64_t q, int xi) { seen.emplace_back(q, xi); });
    CHECK(seen.size() == w.support.size());
    std::sort(seen.begin(), seen.end());
    for (size_t i = 0; i < seen.size(); ++i) {
        CHECK(seen[i].first == w.support[i].first);
        CHECK(seen[i].second == int(w.support[i].second));
    }
}

TEST_CASE("monotonicity probe rejects overflowing products") {
    const SieveWeights w = build_weights(10.0, 100.0, {}, Parity::upper, Construction::brun);
    CHECK_THROWS_AS(theta_monotonicity_probe(uint64_t{1} << 40, uint64_t{1} << 40, w),
                    std::range_error);
}
