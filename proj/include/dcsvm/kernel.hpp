#pragma once

#include <span>
#include <string>
#include <string_view>

namespace dcsvm {

enum class KernelKind { linear, rbf, polynomial };

[[nodiscard]] std::string_view to_string(KernelKind kind) noexcept;
/// Accepts "linear", "rbf" and "poly"/"polynomial".
[[nodiscard]] KernelKind parse_kernel_kind(std::string_view name);

/**
 * Kernel function parameters.
 *
 *  - linear:     <x, y>
 *  - rbf:        exp(-gamma * |x - y|^2)
 *  - polynomial: (gamma * <x, y> + coef0)^degree
 */
struct KernelSpec {
    KernelKind kind{ KernelKind::rbf };
    double gamma{ 1.0 };
    int degree{ 3 };
    double coef0{ 0.0 };

    [[nodiscard]] static KernelSpec linear() { return { KernelKind::linear, 1.0, 1, 0.0 }; }
    [[nodiscard]] static KernelSpec rbf(double gamma) { return { KernelKind::rbf, gamma, 1, 0.0 }; }
    [[nodiscard]] static KernelSpec polynomial(double gamma, int degree, double coef0) { return { KernelKind::polynomial, gamma, degree, coef0 }; }

    /// Throws `ValidationError` unless gamma > 0 (rbf, polynomial) and degree >= 1 (polynomial).
    void validate() const;

    bool operator==(const KernelSpec &) const = default;
};

/// Throws `DimensionError` when the vectors differ in length.
[[nodiscard]] double kernel_eval(const KernelSpec &spec, std::span<const double> x, std::span<const double> y);

/// Human-readable description, e.g. "rbf(gamma=0.25)".
[[nodiscard]] std::string describe(const KernelSpec &spec);

}  // namespace dcsvm
