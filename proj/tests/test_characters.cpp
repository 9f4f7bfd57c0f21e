#include <doctest.h>

#include <cstdint>
#include <stdexcept>

#include <cassert>
#include <cmath>
#include <random>

#include "sievelab/characters.hpp"

using namespace sievelab;

namespace {

// reference Jacobi symbol, straight from the reciprocity laws
int slow_jacobi(uint64_t a, uint64_t n) {
    assert(n % 2 == 1);
    a %= n;
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            if (n % 8 == 3 || n % 8 == 5) t = -t;
        }
        uint64_t tmp = a;
        a = n;
        n = tmp;
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

// Finite class-number-formula oracles, independent of the series path:
// d > 0:  L(1,chi) = -(1/sqrt d) sum chi(r) log sin(pi r / d)
// d < 0:  L(1,chi) = -(pi / D^{3/2}) sum chi(r) r
double l_one_oracle(const RealCharacter& c) {
    const uint64_t d = c.modulus;
    double s = 0.0;
    if (c.disc > 0) {
        for (uint64_t r = 1; r < d; ++r) {
            const int x = c.chi(r);
            if (x != 0) s += x * std::log(std::sin(M_PI * double(r) / double(d)));
        }
        return -s / std::sqrt(double(d));
    }
    for (uint64_t r = 1; r < d; ++r) s += c.chi(r) * double(r);
    return -M_PI * s / (double(d) * std::sqrt(double(d)));
}

}  // namespace

TEST_CASE("kronecker symbol: pinned values") {
    CHECK(kronecker_symbol(5, 5) == 0);
    CHECK(kronecker_symbol(5, 4) == 1);
    CHECK(kronecker_symbol(5, 2) == -1);
    // the quadratic residues mod 5 are {1, 4}; 2 is a non-residue, and since
    // 5 == 1 (mod 4) reciprocity gives (5|2) = (2|5) = -1
    bool two_is_qr_mod5 = false;
    for (uint64_t x = 1; x < 5; ++x)
        if (x * x % 5 == 2) two_is_qr_mod5 = true;
    CHECK(!two_is_qr_mod5);
    // n = 0 conventions
    CHECK(kronecker_symbol(1, 0) == 1);
    CHECK(kronecker_symbol(-1, 0) == 1);
    CHECK(kronecker_symbol(5, 0) == 0);
    CHECK(kronecker_symbol(2, 0) == 0);
    CHECK_THROWS_AS(kronecker_symbol(0, 3), std::invalid_argument);
    // shared factor of 2
    CHECK(kronecker_symbol(8, 2) == 0);
    CHECK(kronecker_symbol(-8, 6) == 0);
}

TEST_CASE("kronecker symbol: agrees with reference Jacobi for odd n") {
    for (uint64_t n = 1; n <= 201; n += 2)
        for (int64_t a = -int64_t(n); a <= int64_t(n); ++a) {
            if (a == 0) continue;
            const int64_t top = a;
            const uint64_t am = uint64_t(((a % int64_t(n)) + int64_t(n)) % int64_t(n));
            CHECK(kronecker_symbol(top, n) == slow_jacobi(am, n));
        }
}

TEST_CASE("kronecker symbol: hand-pinned period tables") {
    // chi_{-4}: period 4 pattern 0, 1, 0, -1
    const int m4[] = {0, 1, 0, -1};
    for (uint64_t n = 0; n < 40; ++n) CHECK(kronecker_symbol(-4, n) == m4[n % 4]);
    // chi_8: +1 at n == +-1 (mod 8), -1 at n == +-3 (mod 8)
    const int m8[] = {0, 1, 0, -1, 0, -1, 0, 1};
    for (uint64_t n = 0; n < 80; ++n) CHECK(kronecker_symbol(8, n) == m8[n % 8]);
    // chi_{-8}: +1 at n == 1, 3 (mod 8), -1 at n == 5, 7 (mod 8)
    const int mm8[] = {0, 1, 0, 1, 0, -1, 0, -1};
    for (uint64_t n = 0; n < 80; ++n) CHECK(kronecker_symbol(-8, n) == mm8[n % 8]);
    // chi_{-3}: quadratic residues mod 3
    const int m3[] = {0, 1, -1};
    for (uint64_t n = 0; n < 30; ++n) CHECK(kronecker_symbol(-3, n) == m3[n % 3]);
    // chi_12 = chi_{-4} chi_{-3}
    for (uint64_t n = 0; n < 120; ++n)
        CHECK(kronecker_symbol(12, n) == m4[n % 4] * m3[n % 3]);
}

TEST_CASE("kronecker symbol: complete multiplicativity in n") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<uint64_t> dn(1, 2000);
    for (int64_t d : {5, -3, 8, -4, 12, -163, 21, -20}) {
        for (int it = 0; it < 200; ++it) {
            const uint64_t m = dn(rng), n = dn(rng);
            CHECK(kronecker_symbol(d, m * n) == kronecker_symbol(d, m) * kronecker_symbol(d, n));
        }
    }
}

TEST_CASE("fundamental discriminant predicate") {
    CHECK(is_fundamental(5));
    CHECK(!is_fundamental(9));
    CHECK(is_fundamental(8));
    CHECK(is_fundamental(12));
    CHECK(is_fundamental(-3));
    CHECK(is_fundamental(-4));
    CHECK(is_fundamental(-7));
    CHECK(is_fundamental(-8));
    CHECK(is_fundamental(-163));
    CHECK(is_fundamental(1));
    CHECK(!is_fundamental(2));
    CHECK(!is_fundamental(3));
    CHECK(!is_fundamental(4));
    CHECK(!is_fundamental(-27));
    CHECK(!is_fundamental(-45));
    CHECK(!is_fundamental(100));
    CHECK_THROWS_AS(is_fundamental(0), std::invalid_argument);
    CHECK_THROWS_AS(RealCharacter::make(7), std::invalid_argument);
}

TEST_CASE("character periodicity and orthogonality") {
    for (int64_t d : {5, -3, 8, -4, 12, -163}) {
        const RealCharacter c = RealCharacter::make(d);
        const auto tab = c.chi_table();
        for (uint64_t n = 1; n <= 10000; ++n)
            CHECK(c.chi(n) == tab[n % c.modulus]);
        int sum = 0;
        for (uint64_t n = 1; n <= c.modulus; ++n) sum += c.chi(n);
        CHECK(sum == 0);
    }
    // orthogonality across every fundamental |d| in [3, 200]
    for (int64_t a = 3; a <= 200; ++a)
        for (int64_t d : {a, -a}) {
            if (!is_fundamental(d)) continue;
            const RealCharacter c = RealCharacter::make(d);
            int sum = 0;
            for (uint64_t n = 1; n <= c.modulus; ++n) sum += c.chi(n);
            CHECK(sum == 0);
        }
}

TEST_CASE("L(1,chi): pinned closed forms") {
    const RealCharacter c5 = RealCharacter::make(5);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(l_one(c5, 1e-12).value ==
          doctest::Approx(2.0 * std::log(golden) / std::sqrt(5.0)).epsilon(1e-10));
    CHECK(l_one(RealCharacter::make(-4), 1e-12).value ==
          doctest::Approx(M_PI / 4.0).epsilon(1e-10));
    CHECK(l_one(RealCharacter::make(-3), 1e-12).value ==
          doctest::Approx(M_PI / std::sqrt(27.0)).epsilon(1e-10));
    CHECK(l_one(c5, 1e-12).tail_bound < 1e-12);
    CHECK_THROWS_AS(l_one(c5, 0.0), std::invalid_argument);
}

TEST_CASE("L(1,chi) vs the class-number oracle for |d| <= 150") {
    for (int64_t a = 3; a <= 150; ++a)
        for (int64_t d : {a, -a}) {
            if (!is_fundamental(d)) continue;
            const RealCharacter c = RealCharacter::make(d);
            const double v = l_one(c, 1e-12).value;
            CHECK(v == doctest::Approx(l_one_oracle(c)).epsilon(1e-8));
        }
}

TEST_CASE("eta values and domain") {
    CHECK(eta(RealCharacter::make(5)) == doctest::Approx(0.6927).epsilon(2e-4));
    CHECK(eta(RealCharacter::make(-3)) == doctest::Approx(0.6643).epsilon(2e-4));
    CHECK(eta(RealCharacter::make(-4)) == doctest::Approx(1.0888).epsilon(2e-4));
    CHECK_THROWS_AS(eta(RealCharacter::make(1)), std::invalid_argument);
    const RealCharacter c = RealCharacter::make(5);
    CHECK(cached_eta(c) == doctest::Approx(eta(c)));
    CHECK(c.cached_eta.has_value());
}

TEST_CASE("exceptionality scan: ranking over 3 <= |d| <= 8") {
    // fundamental discriminants with |d| in [3, 8]: -3, -4, 5, -7, 8, -8
    const auto all = scan_exceptional(3, 8, 100);
    CHECK(all.size() == 6);
    const auto top = scan_exceptional(3, 8, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].disc == -3);
    CHECK(top[1].disc == 5);
    CHECK(top[2].disc == -4);
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].eta <= all[i].eta);
    // a range containing no fundamental discriminant
    CHECK(scan_exceptional(26, 27, 5).empty());
    CHECK_THROWS_AS(scan_exceptional(8, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(scan_exceptional(3, 8, 0), std::invalid_argument);
    // deterministic across thread counts
    const auto t4 = scan_exceptional(3, 100, 20, 4);
    const auto t1 = scan_exceptional(3, 100, 20, 1);
    REQUIRE(t1.size() == t4.size());
    for (size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1[i].disc == t4[i].disc);
        CHECK(t1[i].eta == t4[i].eta);
    }
}

TEST_CASE("extreme discriminants are rejected, not wrapped") {
    CHECK_THROWS_AS(is_fundamental(INT64_MIN), std::range_error);
    CHECK_THROWS_AS(RealCharacter::make(INT64_MIN), std::range_error);
    CHECK_THROWS_AS(is_fundamental(int64_t{1} << 55), std::range_error);
}
