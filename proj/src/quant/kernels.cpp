#include "sftkit/quant/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace sftkit::quant {

#if defined(SFTKIT_HAVE_AVX2)
const Kernels* avx2_kernels_impl();
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool avx2_compiled() {
#if defined(SFTKIT_HAVE_AVX2)
    return true;
#else
    return false;
#endif
}

const Kernels* avx2_kernels() {
#if defined(SFTKIT_HAVE_AVX2)
    return avx2_supported() ? avx2_kernels_impl() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* pick_default() {
    if (const char* env = std::getenv("SFTKIT_KERNELS")) {
        const std::string v(env);
        if (v == "scalar") return &scalar_kernels();
        if (v == "avx2") {
            if (const Kernels* k = avx2_kernels()) return k;
            throw std::runtime_error("SFTKIT_KERNELS=avx2 but AVX2 is unavailable");
        }
    }
    if (const Kernels* k = avx2_kernels()) return k;
    return &scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (k == nullptr) {
        k = pick_default();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

void set_backend(Backend backend) {
    switch (backend) {
        case Backend::Auto:
            g_active.store(nullptr, std::memory_order_release);
            (void)active_kernels();
            break;
        case Backend::Scalar:
            g_active.store(&scalar_kernels(), std::memory_order_release);
            break;
        case Backend::Avx2: {
            const Kernels* k = avx2_kernels();
            if (k == nullptr) {
                throw std::runtime_error("AVX2 kernels unavailable on this machine/build");
            }
            g_active.store(k, std::memory_order_release);
            break;
        }
    }
}

std::string active_backend_name() {
    return active_kernels().name;
}

}  // namespace sftkit::quant
