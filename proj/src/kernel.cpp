#include "dcsvm/kernel.hpp"

#include "dcsvm/error.hpp"

#include "fmt/core.h"

#include <cmath>

namespace dcsvm {

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::linear:
            return "linear";
        case KernelKind::rbf:
            return "rbf";
        case KernelKind::polynomial:
            return "poly";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "linear") {
        return KernelKind::linear;
    }
    if (name == "rbf") {
        return KernelKind::rbf;
    }
    if (name == "poly" || name == "polynomial") {
        return KernelKind::polynomial;
    }
    throw ValidationError{ fmt::format("unknown kernel '{}' (expected linear, rbf or poly)", name) };
}

void KernelSpec::validate() const {
    if (kind != KernelKind::linear && !(gamma > 0.0 && std::isfinite(gamma))) {
        throw ValidationError{ fmt::format("kernel gamma must be positive, got {}", gamma) };
    }
    if (kind == KernelKind::polynomial && degree < 1) {
        throw ValidationError{ fmt::format("polynomial degree must be >= 1, got {}", degree) };
    }
    if (!std::isfinite(coef0)) {
        throw ValidationError{ "kernel coef0 must be finite" };
    }
}

double kernel_eval(const KernelSpec &spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError{ fmt::format("kernel arguments differ in dimension ({} vs {})", x.size(), y.size()) };
    }
    switch (spec.kind) {
        case KernelKind::linear: {
            double dot = 0.0;
            for (std::size_t f = 0; f < x.size(); ++f) {
                dot += x[f] * y[f];
            }
            return dot;
        }
        case KernelKind::rbf: {
            double dist2 = 0.0;
            for (std::size_t f = 0; f < x.size(); ++f) {
                const double diff = x[f] - y[f];
                dist2 += diff * diff;
            }
            return std::exp(-spec.gamma * dist2);
        }
        case KernelKind::polynomial: {
            double dot = 0.0;
            for (std::size_t f = 0; f < x.size(); ++f) {
                dot += x[f] * y[f];
            }
            return std::pow(spec.gamma * dot + spec.coef0, spec.degree);
        }
    }
    return 0.0;
}

std::string describe(const KernelSpec &spec) {
    switch (spec.kind) {
        case KernelKind::linear:
            return "linear";
        case KernelKind::rbf:
            return fmt::format("rbf(gamma={})", spec.gamma);
        case KernelKind::polynomial:
            return fmt::format("poly(gamma={}, degree={}, coef0={})", spec.gamma, spec.degree, spec.coef0);
    }
    return "unknown";
}

}  // namespace dcsvm
