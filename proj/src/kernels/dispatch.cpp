#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

#include "kernels_internal.hpp"

namespace nprr {

namespace {
std::mutex g_sink_mutex;
WarningSink g_sink;
}  // namespace

void set_warning_sink(WarningSink sink) {
    std::lock_guard lock(g_sink_mutex);
    g_sink = std::move(sink);
}

void warn(const std::string& message) {
    std::lock_guard lock(g_sink_mutex);
    if (g_sink) {
        g_sink(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

bool all_finite(VecView v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace nprr

namespace nprr::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(NPRR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Table* initial_table() {
    const Table* best = avx2_table();
    if (best == nullptr) best = &scalar_table();
    if (const char* env = std::getenv("NPRR_SIMD")) {
        if (auto isa = parse_isa(env)) {
            if (*isa == Isa::scalar) return &scalar_table();
            if (auto* t = avx2_table()) return t;
            warn(std::string("NPRR_SIMD=") + env + " not available, using " + best->name);
        } else {
            warn(std::string("unknown NPRR_SIMD value '") + env + "'");
        }
    }
    return best;
}

std::atomic<const Table*>& current() {
    static std::atomic<const Table*> table{initial_table()};
    return table;
}

}  // namespace

const Table& scalar_table() { return detail::kScalarTable; }

const Table* avx2_table() {
#if defined(NPRR_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const Table& active() { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) {
    const Table* t = isa == Isa::scalar ? &scalar_table() : avx2_table();
    if (t == nullptr) return false;
    current().store(t, std::memory_order_relaxed);
    return true;
}

std::optional<Isa> parse_isa(std::string_view name) {
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2") return Isa::avx2;
    return std::nullopt;
}

}  // namespace nprr::kernels
