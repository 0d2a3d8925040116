#include "sane/phenotype.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sane {

DecodeError::DecodeError(std::string organ, int cell_key, const std::string& message)
    : std::runtime_error("decode error in organ '" + organ + "', cell " + std::to_string(cell_key) + ": " + message),
      organ_(std::move(organ)),
      cell_key_(cell_key) {}

Strand mirror_strand(const SearchSpace& space, const Organ& mirrored, const Strand& source) {
    Strand out{mirrored.name, {}};
    for (auto it = source.cells.rbegin(); it != source.cells.rend(); ++it) {
        CellGene cell = *it;
        cell.cell_type = mirrored_cell_type(space, mirrored, it->cell_type);
        out.cells.push_back(std::move(cell));
    }
    relink(out);
    return out;
}

namespace {

class ShapeTracker {
public:
    explicit ShapeTracker(std::vector<int> shape) : shape_(std::move(shape)) {}

    const std::vector<int>& shape() const { return shape_; }
    int channels() const { return shape_.empty() ? 0 : shape_[0]; }

    void make_spatial() {
        while (shape_.size() < 3) {
            shape_.push_back(1);
        }
    }

    std::int64_t features() const {
        return std::accumulate(shape_.begin(), shape_.end(), std::int64_t{1}, std::multiplies<>());
    }

    // Returns false when a spatial axis falls below 1.
    template <typename F>
    bool map_spatial(F&& f) {
        make_spatial();
        for (std::size_t axis = 1; axis <= 2; ++axis) {
            const int next = f(shape_[axis]);
            if (next < 1) {
                return false;
            }
            shape_[axis] = next;
        }
        return true;
    }

    void set_channels(int c) { shape_[0] = c; }
    void flatten_to(int features) { shape_ = {features}; }

private:
    std::vector<int> shape_;
};

struct Builder {
    Phenotype& pheno;
    ShapeTracker shape;
    int last_node = -1;

    void push(ModuleNode node) {
        const int index = static_cast<int>(pheno.nodes.size());
        if (last_node >= 0) {
            pheno.edges.emplace_back(last_node, index);
        }
        pheno.nodes.push_back(std::move(node));
        last_node = index;
    }
};

void expand_cell(Builder& b, const SearchSpace& space, const std::string& organ, const CellGene& cell) {
    const CellType& type = space.cell(cell.cell_type);
    const auto& a = cell.core_attrs;
    auto fail = [&](const std::string& what) { throw DecodeError(organ, cell.key, what); };

    switch (type.core_kind) {
        case CoreKind::conv: {
            b.shape.make_spatial();
            const int in_c = b.shape.channels();
            const int out_c = a[0], k = a[1], s = a[2], p = a[3];
            if (!b.shape.map_spatial([&](int d) {
                    const int span = d + 2 * p - k;
                    return span < 0 ? 0 : span / s + 1;
                })) {
                fail("conv output has spatial size < 1");
            }
            b.shape.set_channels(out_c);
            b.push({"conv", {in_c, out_c, k, s, p}, cell.key, organ});
            break;
        }
        case CoreKind::convtranspose: {
            b.shape.make_spatial();
            const int in_c = b.shape.channels();
            const int out_c = a[0], k = a[1], s = a[2], p = a[3];
            if (!b.shape.map_spatial([&](int d) { return (d - 1) * s - 2 * p + k; })) {
                fail("convtranspose output has spatial size < 1");
            }
            b.shape.set_channels(out_c);
            b.push({"convtranspose", {in_c, out_c, k, s, p}, cell.key, organ});
            break;
        }
        case CoreKind::convlstm: {
            b.shape.make_spatial();
            const int in_c = b.shape.channels();
            // Same padding with hidden width equal to the input width: shape is preserved.
            b.push({"convlstm", {in_c, in_c, a[0]}, cell.key, organ});
            break;
        }
        case CoreKind::linear: {
            const std::int64_t in = b.shape.features();
            if (in > std::numeric_limits<int>::max()) {
                fail("linear input too wide");
            }
            b.shape.flatten_to(a[0]);
            b.push({"linear", {static_cast<int>(in), a[0]}, cell.key, organ});
            break;
        }
    }

    for (const auto& kind : cell.affiliated) {
        if (kind == "maxpool") {
            if (!b.shape.map_spatial([](int d) { return d / 2; })) {
                fail("maxpool output has spatial size < 1");
            }
            b.push({"maxpool", {2, 2}, cell.key, organ});
        } else if (kind == "batchnorm" || kind == "groupnorm") {
            b.push({kind, {b.shape.channels()}, cell.key, organ});
        } else {
            b.push({kind, {}, cell.key, organ});
        }
    }
}

}  // namespace

Phenotype decode(const Genotype& genotype, const SearchSpace& space, std::span<const int> input_shape) {
    Phenotype pheno;
    pheno.input_shape.assign(input_shape.begin(), input_shape.end());
    if (pheno.input_shape.empty() ||
        std::any_of(pheno.input_shape.begin(), pheno.input_shape.end(), [](int d) { return d < 1; })) {
        throw std::invalid_argument("decode: input shape must be non-empty with positive dimensions");
    }

    Builder builder{pheno, ShapeTracker(pheno.input_shape)};
    std::string previous_organ;
    for (const auto& organ : space.organs) {
        Strand derived;
        const Strand* strand = nullptr;
        if (organ.mirrored()) {
            derived = mirror_strand(space, organ, genotype.strand(*organ.mirror_of));
            strand = &derived;
        } else {
            strand = &genotype.strand(organ.name);
        }
        if (!previous_organ.empty() && !space.rule.allows(previous_organ, organ.name)) {
            // Unrelated organs read the network input independently.
            builder.shape = ShapeTracker(pheno.input_shape);
            builder.last_node = -1;
        }
        for (const auto& cell : strand->cells) {
            ++pheno.derived.cell_count[cell.cell_type];
            expand_cell(builder, space, organ.name, cell);
        }
        previous_organ = organ.name;
    }
    pheno.output_shape = builder.shape.shape();
    pheno.derived.layer_count = static_cast<int>(pheno.nodes.size());
    pheno.derived.parameter_count = parameter_count(pheno);
    return pheno;
}

std::int64_t module_parameters(const ModuleNode& node) {
    const auto& a = node.attrs;
    auto at = [&](std::size_t i) -> std::int64_t { return i < a.size() ? a[i] : 0; };
    if (node.kind == "conv" || node.kind == "convtranspose") {
        return at(1) * (at(0) * at(2) * at(2) + 1);
    }
    if (node.kind == "linear") {
        return at(1) * (at(0) + 1);
    }
    if (node.kind == "convlstm") {
        // Four gates, each a convolution over [input, hidden] producing hidden channels.
        return 4 * at(1) * ((at(0) + at(1)) * at(2) * at(2) + 1);
    }
    if (node.kind == "batchnorm" || node.kind == "groupnorm") {
        return 2 * at(0);
    }
    return 0;
}

std::int64_t parameter_count(const Phenotype& phenotype) {
    std::int64_t total = 0;
    for (const auto& node : phenotype.nodes) {
        total += module_parameters(node);
    }
    return total;
}

}  // namespace sane
