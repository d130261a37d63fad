#include "pixshuf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "pixshuf/log.hpp"

namespace pixshuf::kernels {

const Ops* avx2_ops_impl(); // defined in kernels_avx2.cpp

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Ops* detect_avx2() {
    const Ops* ops = avx2_ops_impl();
    if (ops == nullptr || !cpu_has_avx2()) return nullptr;
    return ops;
}

Backend env_backend() {
    const char* env = std::getenv("PIXSHUF_SIMD");
    if (env == nullptr) return Backend::Auto;
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Backend::Avx2;
    return Backend::Auto;
}

struct Dispatch {
    const Ops* ops;
    Backend backend;
};

std::atomic<const Ops*> g_active{nullptr};
std::atomic<int> g_backend{-1};

Dispatch resolve(Backend want) {
    if (want == Backend::Scalar) return {&scalar_ops(), Backend::Scalar};
    const Ops* avx2 = detect_avx2();
    if (want == Backend::Avx2) {
        if (avx2 == nullptr) throw std::runtime_error("AVX2 kernels unavailable on this machine");
        return {avx2, Backend::Avx2};
    }
    if (avx2 != nullptr) return {avx2, Backend::Avx2};
    return {&scalar_ops(), Backend::Scalar};
}

void init_once() {
    if (g_active.load(std::memory_order_acquire) != nullptr) return;
    Dispatch d = resolve(env_backend());
    g_active.store(d.ops, std::memory_order_release);
    g_backend.store(static_cast<int>(d.backend), std::memory_order_release);
    PIXSHUF_LOG_DEBUG("kernel backend: %s", d.ops->name);
}

} // namespace

const Ops& active() {
    init_once();
    return *g_active.load(std::memory_order_acquire);
}

Backend active_backend() {
    init_once();
    return static_cast<Backend>(g_backend.load(std::memory_order_acquire));
}

void set_backend(Backend b) {
    Dispatch d = resolve(b == Backend::Auto ? env_backend() : b);
    g_active.store(d.ops, std::memory_order_release);
    g_backend.store(static_cast<int>(d.backend), std::memory_order_release);
}

const Ops* avx2_ops() { return detect_avx2(); }

} // namespace pixshuf::kernels
