#pragma once

#include "qcnn/encodings.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcnn {

/// Malformed feature-file row; carries the 1-based line number.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed rows that disagree with the dataset's shape.
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FeatureRecord {
    int label = 0;
    std::vector<double> features;
};

struct DatasetManifest {
    std::size_t n_records = 0;
    std::size_t feature_dim = 0;
    std::array<std::size_t, 2> class_counts{};
    std::string source;
    std::string checksum; // FNV-1a 64 of the CSV bytes

    [[nodiscard]] std::string to_json() const;
};

struct Dataset {
    std::vector<FeatureRecord> records;
    DatasetManifest manifest;
};

/// Parses CSV text with header `label,f0,...,f{D-1}`.
Dataset parse_features(std::string_view text, std::string source = "<memory>");
Dataset load_features(const std::filesystem::path &path);

/// Exact CSV serialization (17 significant digits, so values round-trip).
std::string format_features(const std::vector<FeatureRecord> &records);
/// Writes the CSV and returns its manifest.
DatasetManifest write_features(const std::vector<FeatureRecord> &records,
                               const std::filesystem::path &path, std::string source = {});
DatasetManifest make_manifest(const std::vector<FeatureRecord> &records, std::string source,
                              std::string_view csv_bytes);

/**
 * Two isotropic unit-variance Gaussian classes in `dim` dimensions whose
 * means are `separation` apart. The means differ by a uniform shift of
 * features 1..dim-1 and share a large offset on feature 0, so the classes are
 * not mirror images of each other through the origin.
 */
std::vector<FeatureRecord> synthesize_gaussians(std::size_t dim, std::size_t n_per_class,
                                                double separation, std::uint64_t seed);

/// Parameters of a synthetic dataset, written `synth:dim=256,n=200,sep=8,seed=0`.
struct SyntheticSpec {
    std::size_t dim = 256;
    std::size_t n_per_class = 200;
    double separation = 8.0;
    std::uint64_t seed = 0;

    static bool matches(std::string_view text);
    static SyntheticSpec parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::vector<FeatureRecord> generate() const;
};

/// Loads a CSV path or generates a `synth:` spec.
Dataset load_or_synthesize(std::string_view source);

struct SplitResult {
    std::vector<FeatureRecord> train;
    std::vector<FeatureRecord> test;
};

/**
 * Stratified seeded split. Each class contributes round(fraction * n_c)
 * records to train, clamped so both sides get at least one.
 */
SplitResult split(const std::vector<FeatureRecord> &records, double train_fraction,
                  std::uint64_t seed);

struct PreprocessResult {
    std::vector<FeatureRecord> records;
    std::vector<std::size_t> rejected; // input indices dropped (zero norm)
};

/**
 * Per-encoding preprocessing. Amplitude: L2-normalize and zero-pad to 2^n.
 * Angle kinds: per-column min-max rescale to [0, pi - 1e-6], fit on the
 * training split and clamped when applied to other data.
 */
class Preprocessor {
  public:
    static constexpr double kAngleMargin = 1e-6;

    explicit Preprocessor(EncodingSpec spec) : spec_(spec) {}

    void fit(const std::vector<FeatureRecord> &train);
    [[nodiscard]] PreprocessResult apply(const std::vector<FeatureRecord> &records) const;
    [[nodiscard]] bool fitted() const noexcept { return fitted_; }

  private:
    EncodingSpec spec_;
    bool fitted_ = false;
    std::vector<double> lo_;
    std::vector<double> hi_;
};

} // namespace qcnn
