#pragma once

#include "dcsvm/dataset.hpp"
#include "dcsvm/dcsvm_tree.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace dcsvm {

/// Everything needed to classify new samples without the training data.
struct ModelFile {
    static constexpr int format_version = 1;

    std::size_t dimension{ 0 };
    std::optional<MinMaxScaler> scaler;
    KernelSpec kernel;
    SvmHyperParams hp;
    DcsvmModel model;

    /// Applies the stored scaling (if any). Throws `DimensionError` on a size mismatch.
    [[nodiscard]] FeatureVector prepare(std::span<const double> x) const;
    [[nodiscard]] DcsvmPrediction predict(std::span<const double> x) const { return classify(model, prepare(x)); }
};

/**
 * Text container:
 *
 *     DCSVM-MODEL v<version>
 *     checksum fnv1a64:<16 hex digits of the body>
 *     <JSON body>
 *
 * Doubles are written in shortest round-trip form, so a loaded model is bit-identical.
 */
[[nodiscard]] std::string serialize_model(const ModelFile &file);

/// Throws `VersionError` for another format version, `ChecksumError` when the body does not
/// match its checksum (truncation, corruption) and `ModelFormatError` for any other defect.
[[nodiscard]] ModelFile deserialize_model(std::string_view text);

void save_model(const std::filesystem::path &path, const ModelFile &file);
[[nodiscard]] ModelFile load_model(const std::filesystem::path &path);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace dcsvm
