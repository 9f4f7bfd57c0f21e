#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>
#include <random>

#include "sievelab/lambda_decomp.hpp"

using namespace sievelab;

TEST_CASE("unit values of the three convolutions") {
    const DecompSet ds = build_decomp(RealCharacter::make(5), 100);
    CHECK(ds.lambda[1] == 1.0);
    CHECK(ds.lambda_prime[1] == 0.0);
    CHECK(ds.nu[1] == 1.0);
}

TEST_CASE("lambda'(p) = log p at primes") {
    const DecompSet ds = build_decomp(RealCharacter::make(-3), 2000);
    for (uint64_t p : {2, 3, 5, 7, 11, 1999})
        CHECK(ds.lambda_prime[p] == doctest::Approx(std::log(double(p))).epsilon(1e-13));
}

TEST_CASE("nu at small prime powers for d = 5") {
    const RealCharacter chi = RealCharacter::make(5);
    const DecompSet ds = build_decomp(chi, 100);
    CHECK(ds.nu[2] == doctest::Approx(-1.0 - chi.chi(2)));  // = 0
    CHECK(ds.nu[2] == 0.0);
    CHECK(ds.nu[4] == doctest::Approx(double(chi.chi(2))));  // = -1
    CHECK(ds.nu[4] == -1.0);
}

TEST_CASE("nu pattern on prime powers matches the convolution") {
    for (int64_t d : {5, -4}) {
        const RealCharacter chi = RealCharacter::make(d);
        const uint64_t n = 5000;
        const DecompSet ds = build_decomp(chi, n);
        for (uint64_t p = 2; p <= n; ++p) {
            if (!is_prime(p)) continue;
            CHECK(ds.nu[p] == doctest::Approx(-1.0 - chi.chi(p)));
            if (p * p <= n) CHECK(ds.nu[p * p] == doctest::Approx(double(chi.chi(p))));
            for (uint64_t pk = p * p * p; pk <= n; pk *= p) CHECK(ds.nu[pk] == 0.0);
        }
    }
}

TEST_CASE("Moebius inversion: Lambda = lambda' * nu") {
    const DecompSet ds = build_decomp(RealCharacter::make(-3), 10000);
    CHECK(verify_inversion(ds, 2) < 1e-9);
    // two-term expansion at a prime: lambda'(1) nu(p) + lambda'(p) nu(1)
    CHECK(ds.lambda_prime[1] * ds.nu[13] + ds.lambda_prime[13] * ds.nu[1] ==
          doctest::Approx(std::log(13.0)).epsilon(1e-13));
}

TEST_CASE("lambda' = lambda * Lambda") {
    const uint64_t n = 2000;
    const DecompSet ds = build_decomp(RealCharacter::make(5), n);
    ArithSeq mangoldt(n);
    for (uint64_t m = 1; m <= n; ++m) mangoldt[m] = ds.mangoldt[m];
    const ArithSeq alt = dirichlet_convolve(ds.lambda, mangoldt);
    for (uint64_t m = 1; m <= n; ++m)
        CHECK(alt[m] == doctest::Approx(ds.lambda_prime[m]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("lambda is multiplicative on coprime pairs") {
    const uint64_t n = 10000;
    const DecompSet ds = build_decomp(RealCharacter::make(12), n);
    std::mt19937 rng(5);
    std::uniform_int_distribution<uint64_t> dist(1, 99);
    int checked = 0;
    while (checked < 200) {
        const uint64_t a = dist(rng), b = dist(rng);
        if (std::gcd(a, b) != 1 || a * b > n) continue;
        ++checked;
        CHECK(ds.lambda[a * b] == doctest::Approx(ds.lambda[a] * ds.lambda[b]));
    }
}

TEST_CASE("splitting at y recombines to Lambda") {
    DecompSet ds = build_decomp(RealCharacter::make(5), 1000);
    SUBCASE("y = 10") {
        split(ds, 10, 2);
        double worst = 0.0;
        for (uint64_t m = 1; m <= 1000; ++m)
            worst = std::max(worst,
                             std::fabs(ds.lambda_star[m] + ds.lambda_sub[m] - ds.mangoldt[m]));
        CHECK(worst < 1e-10);
    }
    SUBCASE("y > N: the tail part vanishes identically") {
        split(ds, 2000, 1);
        for (uint64_t m = 1; m <= 1000; ++m) {
            CHECK(ds.lambda_sub[m] == 0.0);
            CHECK(ds.lambda_star[m] == doctest::Approx(ds.mangoldt[m]).epsilon(1e-10).scale(1.0));
        }
    }
    SUBCASE("y = 1: the short part vanishes identically") {
        split(ds, 1, 1);
        for (uint64_t m = 1; m <= 1000; ++m) CHECK(ds.lambda_star[m] == 0.0);
    }
    CHECK_THROWS_AS(split(ds, 0), std::invalid_argument);
}

TEST_CASE("pointwise bounds hold on [1, 20000]") {
    for (int64_t d : {5, -4}) {
        const DecompSet ds = build_decomp(RealCharacter::make(d), 20000);
        const auto v = verify_pointwise_bounds(ds, 2);
        CHECK(v.empty());
    }
}

TEST_CASE("pointwise bound checker notices a corrupted table") {
    DecompSet ds = build_decomp(RealCharacter::make(5), 100);
    ds.lambda[30] = -1.0;  // |nu| <= lambda must now fail at 30
    const auto v = verify_pointwise_bounds(ds);
    bool found = false;
    for (const auto& b : v)
        if (b.n == 30) found = true;
    CHECK(found);
}

TEST_CASE("build rejects bad sizes") {
    CHECK_THROWS_AS(build_decomp(RealCharacter::make(5), 0), std::invalid_argument);
}
