#include <cstdlib>
#include <cstring>

#include "invgae/common.hpp"
#include "invgae/kernels.hpp"

namespace invgae::kernels {

#if defined(INVGAE_BUILD_AVX2)
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(INVGAE_BUILD_AVX2)
    if (__builtin_cpu_supports("avx2")) return avx2_table_impl();
#endif
    return nullptr;
}

namespace {

const KernelTable* pick_initial() {
    if (const char* env = std::getenv("INVGAE_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_table();
        if (std::strcmp(env, "avx2") == 0) {
            if (const KernelTable* t = avx2_table()) return t;
            throw ConfigError("INVGAE_KERNELS=avx2 but AVX2 kernels are unavailable");
        }
        throw ConfigError(std::string("INVGAE_KERNELS: unknown backend '") + env + "'");
    }
    if (const KernelTable* t = avx2_table()) return t;
    return &scalar_table();
}

const KernelTable*& active_ptr() {
    static const KernelTable* table = pick_initial();
    return table;
}

}  // namespace

const KernelTable& active() { return *active_ptr(); }

Backend active_backend() {
    return active_ptr() == &scalar_table() ? Backend::Scalar : Backend::Avx2;
}

void force_backend(Backend b) {
    if (b == Backend::Scalar) {
        active_ptr() = &scalar_table();
        return;
    }
    const KernelTable* t = avx2_table();
    if (!t) throw ConfigError("AVX2 kernel backend unavailable on this machine/build");
    active_ptr() = t;
}

}  // namespace invgae::kernels
