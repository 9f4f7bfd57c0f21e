#include "sievelab/prime_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "sievelab/arith.hpp"

namespace sievelab {

namespace {

constexpr char kMagic[4] = {'S', 'L', 'P', 'T'};
constexpr uint8_t kVersion = 1;

void put_u64_le(uint8_t* buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint64_t get_u64_le(const uint8_t* buf) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

bool write_prime_cache(const std::string& path, const std::vector<uint64_t>& primes) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) return false;
    bool ok = std::fwrite(kMagic, 1, 4, f) == 4 && std::fwrite(&kVersion, 1, 1, f) == 1;
    uint8_t buf[8];
    put_u64_le(buf, primes.size());
    ok = ok && std::fwrite(buf, 1, 8, f) == 8;
    for (uint64_t p : primes) {
        put_u64_le(buf, p);
        if (!(ok = ok && std::fwrite(buf, 1, 8, f) == 8)) break;
    }
    ok = std::fclose(f) == 0 && ok;
    if (!ok) std::remove(path.c_str());
    return ok;
}

bool read_prime_cache(const std::string& path, std::vector<uint64_t>& primes) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return false;
    bool ok = true;
    char magic[4];
    uint8_t version = 0;
    uint8_t buf[8];
    ok = std::fread(magic, 1, 4, f) == 4 && std::memcmp(magic, kMagic, 4) == 0;
    ok = ok && std::fread(&version, 1, 1, f) == 1 && version == kVersion;
    uint64_t count = 0;
    if ((ok = ok && std::fread(buf, 1, 8, f) == 8)) count = get_u64_le(buf);
    if (ok && count > (uint64_t{1} << 40)) ok = false;  // refuse absurd headers
    std::vector<uint64_t> out;
    if (ok) {
        out.reserve(static_cast<size_t>(count));
        uint64_t prev = 0;
        for (uint64_t i = 0; i < count && ok; ++i) {
            ok = std::fread(buf, 1, 8, f) == 8;
            if (ok) {
                const uint64_t p = get_u64_le(buf);
                if (p <= prev) ok = false;  // must be strictly increasing
                prev = p;
                out.push_back(p);
            }
        }
    }
    std::fclose(f);
    if (ok) primes = std::move(out);
    return ok;
}

std::vector<uint64_t> cached_primes(uint64_t limit, const std::string& dir) {
    std::string base = dir;
    if (base.empty()) {
        if (const char* env = std::getenv("SIEVELAB_CACHE")) base = env;
    }
    if (base.empty()) return sieve_primes(limit);
    const std::string path = base + "/primes_" + std::to_string(limit) + ".slpt";
    std::vector<uint64_t> primes;
    if (read_prime_cache(path, primes)) {
        if (!primes.empty() && primes.back() <= limit) return primes;
        if (primes.empty() && limit < 2) return primes;
    }
    primes = sieve_primes(limit);
    write_prime_cache(path, primes);  // best effort
    return primes;
}

}  // namespace sievelab
