#include "multiboson/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace multiboson {

bool is_permutation(const Permutation& rho) {
    const int n = static_cast<int>(rho.size());
    std::vector<bool> seen(rho.size(), false);
    for (int v : rho) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

Permutation identity_permutation(int n) {
    Permutation rho(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rho[static_cast<std::size_t>(i)] = i;
    return rho;
}

Permutation inverse_permutation(const Permutation& rho) {
    Permutation inv(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) inv[static_cast<std::size_t>(rho[i])] = static_cast<int>(i);
    return inv;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

int worker_count() {
    if (const char* env = std::getenv("MULTIBOSON_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? static_cast<int>(hw) : 1;
}

}  // namespace multiboson
