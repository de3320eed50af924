#include "marginlab/core/dataset.hpp"

#include "marginlab/core/errors.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace marginlab {

std::string_view label_kind_name(LabelKind kind) noexcept {
    switch (kind) {
        case LabelKind::binary: return "binary";
        case LabelKind::multiclass: return "multiclass";
        case LabelKind::regression: return "regression";
    }
    return "unknown";
}

namespace {

double encode_label(const Label& y, LabelKind kind) {
    return std::visit(
        [kind](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BinaryLabel>) {
                if (kind != LabelKind::binary) throw std::invalid_argument("binary label in non-binary dataset");
                return static_cast<double>(v.sign);
            } else if constexpr (std::is_same_v<T, ClassLabel>) {
                if (kind != LabelKind::multiclass)
                    throw std::invalid_argument("class label in non-multiclass dataset");
                return static_cast<double>(v.index);
            } else {
                if (kind != LabelKind::regression)
                    throw std::invalid_argument("real target in non-regression dataset");
                return v.value;
            }
        },
        y);
}

}  // namespace

Dataset::Dataset(const std::vector<LabeledExample>& examples, LabelKind kind, std::size_t num_classes)
    : kind_(kind), num_classes_(num_classes) {
    if (examples.empty()) throw std::invalid_argument("dataset needs at least one example");
    d_ = examples.front().x.size();
    features_.reserve(examples.size() * d_);
    labels_.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        if (ex.x.size() != d_)
            throw DimensionError("example " + std::to_string(i) + " has dimension " +
                                 std::to_string(ex.x.size()) + ", expected " + std::to_string(d_));
        features_.insert(features_.end(), ex.x.begin(), ex.x.end());
        labels_.push_back(encode_label(ex.y, kind));
    }
    if (kind_ == LabelKind::binary) num_classes_ = 2;
    if (kind_ == LabelKind::regression) num_classes_ = 0;
    validate();
}

Dataset Dataset::from_rows(std::size_t d, std::vector<double> features, std::vector<double> labels,
                           LabelKind kind, std::size_t num_classes) {
    Dataset ds;
    ds.d_ = d;
    ds.kind_ = kind;
    ds.num_classes_ = kind == LabelKind::binary ? 2 : (kind == LabelKind::regression ? 0 : num_classes);
    if (labels.empty()) throw std::invalid_argument("dataset needs at least one example");
    if (features.size() != labels.size() * d)
        throw DimensionError("feature buffer size " + std::to_string(features.size()) +
                             " does not match n*d = " + std::to_string(labels.size() * d));
    ds.features_ = std::move(features);
    ds.labels_ = std::move(labels);
    ds.validate();
    return ds;
}

void Dataset::validate() const {
    if (d_ == 0) throw DimensionError("dataset dimension must be positive");
    for (std::size_t k = 0; k < features_.size(); ++k)
        if (!std::isfinite(features_[k]))
            throw std::invalid_argument("non-finite feature in example " + std::to_string(k / d_));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const double y = labels_[i];
        switch (kind_) {
            case LabelKind::binary:
                if (y != 1.0 && y != -1.0)
                    throw std::invalid_argument("binary label must be -1 or +1 (example " +
                                                std::to_string(i) + ")");
                break;
            case LabelKind::multiclass:
                if (num_classes_ < 2 || y < 0.0 || y != std::floor(y) ||
                    y >= static_cast<double>(num_classes_))
                    throw std::invalid_argument("class label out of range (example " + std::to_string(i) + ")");
                break;
            case LabelKind::regression:
                if (!std::isfinite(y))
                    throw std::invalid_argument("non-finite target (example " + std::to_string(i) + ")");
                break;
        }
    }
}

LabeledExample Dataset::example(std::size_t i) const {
    const auto xi = x(i);
    LabeledExample ex{{xi.begin(), xi.end()}, RealTarget{labels_[i]}};
    if (kind_ == LabelKind::binary) ex.y = BinaryLabel{labels_[i] > 0 ? 1 : -1};
    if (kind_ == LabelKind::multiclass) ex.y = ClassLabel{static_cast<std::size_t>(labels_[i])};
    return ex;
}

double Dataset::max_norm() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
        double s = 0.0;
        for (double v : x(i)) s += v * v;
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

Dataset Dataset::with_appended(const LabeledExample& example) const {
    if (example.x.size() != d_) throw DimensionError("appended example has wrong dimension");
    Dataset out = *this;
    out.features_.insert(out.features_.end(), example.x.begin(), example.x.end());
    out.labels_.push_back(encode_label(example.y, kind_));
    out.validate();
    return out;
}

Dataset Dataset::head(std::size_t count) const {
    if (count == 0 || count > n()) throw std::invalid_argument("head count out of range");
    Dataset out = *this;
    out.features_.resize(count * d_);
    out.labels_.resize(count);
    return out;
}

bool operator==(const Dataset& a, const Dataset& b) noexcept {
    if (a.d_ != b.d_ || a.kind_ != b.kind_ || a.num_classes_ != b.num_classes_ ||
        a.labels_.size() != b.labels_.size())
        return false;
    return std::memcmp(a.features_.data(), b.features_.data(), a.features_.size() * sizeof(double)) == 0 &&
           std::memcmp(a.labels_.data(), b.labels_.data(), a.labels_.size() * sizeof(double)) == 0;
}

}  // namespace marginlab
