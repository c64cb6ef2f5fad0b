#include "qcnn/dataio.hpp"

#include "qcnn/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace qcnn {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view field, std::size_t line, std::size_t column) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(line, "column " + std::to_string(column) + ": '" + std::string(field) +
                                   "' is not a number");
    }
    if (!std::isfinite(value)) {
        throw ParseError(line, "column " + std::to_string(column) + ": non-finite value");
    }
    return value;
}

void count_classes(const std::vector<FeatureRecord> &records, DatasetManifest &m) {
    m.class_counts = {0, 0};
    for (const auto &r : records) {
        m.class_counts[static_cast<std::size_t>(r.label)] += 1;
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string DatasetManifest::to_json() const {
    nlohmann::ordered_json j;
    j["n_records"] = n_records;
    j["feature_dim"] = feature_dim;
    j["class_counts"] = {class_counts[0], class_counts[1]};
    j["source"] = source;
    j["checksum"] = checksum;
    return j.dump(2);
}

Dataset parse_features(std::string_view text, std::string source) {
    Dataset ds;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    std::size_t dim = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (!have_header) {
            if (trim(fields[0]) != "label") {
                throw ParseError(line_no, "header must start with 'label'");
            }
            for (std::size_t i = 1; i < fields.size(); ++i) {
                if (trim(fields[i]) != "f" + std::to_string(i - 1)) {
                    throw ParseError(line_no, "header column " + std::to_string(i) +
                                                  " must be f" + std::to_string(i - 1));
                }
            }
            dim = fields.size() - 1;
            have_header = true;
            continue;
        }
        if (fields.size() != dim + 1) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim + 1) + " fields, found " +
                              std::to_string(fields.size()));
        }
        FeatureRecord rec;
        const auto label = trim(fields[0]);
        if (label == "0") {
            rec.label = 0;
        } else if (label == "1") {
            rec.label = 1;
        } else {
            throw ParseError(line_no, "label must be 0 or 1, got '" + std::string(label) + "'");
        }
        rec.features.reserve(dim);
        for (std::size_t i = 1; i <= dim; ++i) {
            rec.features.push_back(parse_double(fields[i], line_no, i));
        }
        ds.records.push_back(std::move(rec));
    }
    if (!have_header) {
        throw ParseError(std::max<std::size_t>(line_no, 1), "missing header");
    }
    ds.manifest.n_records = ds.records.size();
    ds.manifest.feature_dim = dim;
    count_classes(ds.records, ds.manifest);
    ds.manifest.source = std::move(source);
    ds.manifest.checksum = fnv1a_hex(text);
    return ds;
}

Dataset load_features(const std::filesystem::path &path) {
    return parse_features(read_file(path), path.string());
}

std::string format_features(const std::vector<FeatureRecord> &records) {
    const std::size_t dim = records.empty() ? 0 : records.front().features.size();
    std::string out = "label";
    for (std::size_t i = 0; i < dim; ++i) {
        out += ",f" + std::to_string(i);
    }
    out += '\n';
    for (const auto &r : records) {
        if (r.features.size() != dim) {
            throw SchemaError("records have inconsistent feature dimensions");
        }
        if (r.label != 0 && r.label != 1) {
            throw SchemaError("labels must be 0 or 1");
        }
        out += std::to_string(r.label);
        for (const double v : r.features) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

DatasetManifest make_manifest(const std::vector<FeatureRecord> &records, std::string source,
                              std::string_view csv_bytes) {
    DatasetManifest m;
    m.n_records = records.size();
    m.feature_dim = records.empty() ? 0 : records.front().features.size();
    count_classes(records, m);
    m.source = std::move(source);
    m.checksum = fnv1a_hex(csv_bytes);
    return m;
}

DatasetManifest write_features(const std::vector<FeatureRecord> &records,
                               const std::filesystem::path &path, std::string source) {
    const std::string text = format_features(records);
    write_file_atomic(path, text);
    return make_manifest(records, source.empty() ? path.string() : std::move(source), text);
}

namespace {
constexpr double kOffsetScale = 2.0;
} // namespace

std::vector<FeatureRecord> synthesize_gaussians(std::size_t dim, std::size_t n_per_class,
                                                double separation, std::uint64_t seed) {
    if (dim < 2) {
        throw std::invalid_argument("synthesize_gaussians: dim must be at least 2");
    }
    if (n_per_class < 1) {
        throw std::invalid_argument("synthesize_gaussians: n_per_class must be at least 1");
    }
    if (!std::isfinite(separation) || separation < 0.0) {
        throw std::invalid_argument("synthesize_gaussians: separation must be finite and >= 0");
    }
    // Both means share an offset of kOffsetScale * sqrt(dim) on feature 0 and
    // differ along the normalized all-ones direction over features 1..dim-1.
    const double offset = kOffsetScale * std::sqrt(static_cast<double>(dim));
    const double unit = 1.0 / std::sqrt(static_cast<double>(dim - 1));
    std::vector<double> u(dim, unit);
    u[0] = 0.0;

    std::vector<FeatureRecord> out;
    out.reserve(2 * n_per_class);
    for (int label = 0; label <= 1; ++label) {
        const double side = (label == 0 ? -0.5 : 0.5) * separation;
        for (std::size_t i = 0; i < n_per_class; ++i) {
            SplitMix64 rng(derive_seed(seed, 20 + static_cast<std::uint64_t>(label), i));
            FeatureRecord r;
            r.label = label;
            r.features.resize(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                r.features[k] = (k == 0 ? offset : 0.0) + side * u[k] + rng.normal();
            }
            out.push_back(std::move(r));
        }
    }
    return out;
}

bool SyntheticSpec::matches(std::string_view text) { return text.rfind("synth:", 0) == 0; }

SyntheticSpec SyntheticSpec::parse(std::string_view text) {
    if (!matches(text)) {
        throw std::invalid_argument("synthetic spec must start with 'synth:'");
    }
    SyntheticSpec spec;
    auto rest = text.substr(6);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) {
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("synthetic spec item '" + std::string(item) +
                                        "' is not key=value");
        }
        const auto key = item.substr(0, eq);
        const auto value = std::string(item.substr(eq + 1));
        try {
            std::size_t used = 0;
            if (key == "dim") {
                spec.dim = std::stoul(value, &used);
            } else if (key == "n") {
                spec.n_per_class = std::stoul(value, &used);
            } else if (key == "sep") {
                spec.separation = std::stod(value, &used);
            } else if (key == "seed") {
                spec.seed = std::stoull(value, &used);
            } else {
                throw std::invalid_argument("unknown synthetic spec key '" + std::string(key) + "'");
            }
            if (used != value.size()) {
                throw std::invalid_argument("");
            }
        } catch (const std::logic_error &) {
            throw std::invalid_argument("bad value for synthetic spec key '" + std::string(key) +
                                        "': '" + value + "'");
        }
    }
    return spec;
}

std::string SyntheticSpec::to_string() const {
    return "synth:dim=" + std::to_string(dim) + ",n=" + std::to_string(n_per_class) +
           ",sep=" + format_double(separation) + ",seed=" + std::to_string(seed);
}

std::vector<FeatureRecord> SyntheticSpec::generate() const {
    return synthesize_gaussians(dim, n_per_class, separation, seed);
}

Dataset load_or_synthesize(std::string_view source) {
    if (SyntheticSpec::matches(source)) {
        const auto spec = SyntheticSpec::parse(source);
        Dataset ds;
        ds.records = spec.generate();
        ds.manifest = make_manifest(ds.records, spec.to_string(), format_features(ds.records));
        return ds;
    }
    return load_features(std::filesystem::path(std::string(source)));
}

SplitResult split(const std::vector<FeatureRecord> &records, double train_fraction,
                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
    }
    SplitResult out;
    for (int label = 0; label <= 1; ++label) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].label == label) {
                members.push_back(i);
            }
        }
        if (members.empty()) {
            continue;
        }
        if (members.size() < 2) {
            throw std::invalid_argument("class " + std::to_string(label) +
                                        " has fewer than 2 records; cannot split");
        }
        SplitMix64 rng(derive_seed(seed, 30 + static_cast<std::uint64_t>(label)));
        const auto order = shuffled_indices(members.size(), rng);
        const auto n = members.size();
        auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            const auto &rec = records[members[order[k]]];
            (k < n_train ? out.train : out.test).push_back(rec);
        }
    }
    return out;
}

void Preprocessor::fit(const std::vector<FeatureRecord> &train) {
    if (train.empty()) {
        throw std::invalid_argument("Preprocessor::fit: empty training set");
    }
    const std::size_t dim = train.front().features.size();
    spec_.check_dimension(dim);
    lo_.assign(dim, 0.0);
    hi_.assign(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
        lo_[k] = hi_[k] = train.front().features[k];
    }
    for (const auto &r : train) {
        if (r.features.size() != dim) {
            throw SchemaError("inconsistent feature dimension in training data");
        }
        for (std::size_t k = 0; k < dim; ++k) {
            lo_[k] = std::min(lo_[k], r.features[k]);
            hi_[k] = std::max(hi_[k], r.features[k]);
        }
    }
    fitted_ = true;
}

PreprocessResult Preprocessor::apply(const std::vector<FeatureRecord> &records) const {
    PreprocessResult out;
    out.records.reserve(records.size());
    if (spec_.kind == EncodingKind::Amplitude) {
        const std::size_t width = spec_.feature_width();
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto &r = records[i];
            spec_.check_dimension(r.features.size());
            double sq = 0.0;
            for (const double v : r.features) {
                sq += v * v;
            }
            const double norm = std::sqrt(sq);
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                out.rejected.push_back(i);
                continue;
            }
            FeatureRecord p;
            p.label = r.label;
            p.features.assign(width, 0.0);
            for (std::size_t k = 0; k < r.features.size(); ++k) {
                p.features[k] = r.features[k] / norm;
            }
            out.records.push_back(std::move(p));
        }
        return out;
    }
    if (!fitted_) {
        throw std::logic_error("Preprocessor::apply: angle rescaling used before fit");
    }
    const double top = std::numbers::pi - kAngleMargin;
    for (const auto &r : records) {
        if (r.features.size() != lo_.size()) {
            throw SchemaError("feature dimension differs from the fitted data");
        }
        FeatureRecord p;
        p.label = r.label;
        p.features.resize(r.features.size());
        for (std::size_t k = 0; k < r.features.size(); ++k) {
            const double span = hi_[k] - lo_[k];
            if (span <= 0.0) {
                p.features[k] = 0.0;
                continue;
            }
            const double t = std::clamp((r.features[k] - lo_[k]) / span, 0.0, 1.0);
            p.features[k] = t * top;
        }
        out.records.push_back(std::move(p));
    }
    return out;
}

} // namespace qcnn
