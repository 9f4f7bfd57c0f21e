#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Optional on-disk cache of prime tables, enabled by pointing the
// SIEVELAB_CACHE environment variable at a directory. Binary format: magic
// "SLPT", one version byte (1), little-endian u64 count, then that many
// little-endian u64 primes.

namespace sievelab {

bool write_prime_cache(const std::string& path, const std::vector<uint64_t>& primes);

// Returns false on missing, unreadable or malformed files.
bool read_prime_cache(const std::string& path, std::vector<uint64_t>& primes);

// Primes <= limit, going through SIEVELAB_CACHE (or `dir` when nonempty)
// when available; silently recomputes on any cache problem.
std::vector<uint64_t> cached_primes(uint64_t limit, const std::string& dir = "");

}  // namespace sievelab
