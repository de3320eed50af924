#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace marginlab {

enum class LabelKind { binary, multiclass, regression };

std::string_view label_kind_name(LabelKind kind) noexcept;

struct BinaryLabel {
    int sign;  // -1 or +1
};
struct ClassLabel {
    std::size_t index;  // in [0, num_classes)
};
struct RealTarget {
    double value;
};
using Label = std::variant<BinaryLabel, ClassLabel, RealTarget>;

struct LabeledExample {
    std::vector<double> x;
    Label y;
};

// Immutable, row-major collection of examples sharing one dimension and one
// label kind. Labels are stored as doubles: +-1 (binary), class index
// (multiclass) or the target value (regression).
class Dataset {
public:
    // Throws DimensionError / std::invalid_argument on ragged or invalid input.
    Dataset(const std::vector<LabeledExample>& examples, LabelKind kind, std::size_t num_classes = 0);
    static Dataset from_rows(std::size_t d, std::vector<double> features, std::vector<double> labels,
                             LabelKind kind, std::size_t num_classes = 0);

    std::size_t n() const noexcept { return labels_.size(); }
    std::size_t d() const noexcept { return d_; }
    LabelKind kind() const noexcept { return kind_; }
    // 2 for binary data, l for multiclass, 0 for regression.
    std::size_t num_classes() const noexcept { return num_classes_; }

    std::span<const double> x(std::size_t i) const noexcept {
        return {features_.data() + i * d_, d_};
    }
    double label(std::size_t i) const noexcept { return labels_[i]; }
    LabeledExample example(std::size_t i) const;

    const std::vector<double>& features() const noexcept { return features_; }
    const std::vector<double>& labels() const noexcept { return labels_; }

    // max_i ||x_i||_2
    double max_norm() const noexcept;

    Dataset with_appended(const LabeledExample& example) const;
    Dataset head(std::size_t count) const;

    // Bit-exact comparison of every stored value.
    friend bool operator==(const Dataset& a, const Dataset& b) noexcept;

private:
    Dataset() = default;
    void validate() const;

    std::size_t d_ = 0;
    LabelKind kind_ = LabelKind::binary;
    std::size_t num_classes_ = 0;
    std::vector<double> features_;
    std::vector<double> labels_;
};

}  // namespace marginlab
