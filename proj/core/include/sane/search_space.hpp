#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sane {

/// Kind of the trainable core module of a cell.
enum class CoreKind { conv, linear, convtranspose, convlstm };

std::string_view to_string(CoreKind kind);
std::optional<CoreKind> parse_core_kind(std::string_view text);

/// Attribute names each core kind expects, in order.
const std::vector<std::string>& core_attr_names(CoreKind kind);

/// Affiliated (parameter-free or normalisation) modules a cell may carry.
const std::vector<std::string>& known_affiliated_kinds();

/// One integer attribute of a core module: finite domain [min, max] plus the
/// default mutation step.
struct AttrDescriptor {
    std::string name;
    int min = 1;
    int max = 1;
    int growth = 1;

    bool contains(int value) const { return value >= min && value <= max; }
    friend bool operator==(const AttrDescriptor&, const AttrDescriptor&) = default;
};

struct CellType {
    std::string name;
    CoreKind core_kind = CoreKind::conv;
    std::vector<AttrDescriptor> attrs;
    std::vector<std::string> allowed_affiliated;
    std::vector<int> initial_core_attrs;
    std::vector<std::string> initial_affiliated;

    bool allows_affiliated(std::string_view kind) const;
    friend bool operator==(const CellType&, const CellType&) = default;
};

struct Organ {
    std::string name;
    std::vector<std::string> allowed_cells;
    /// Relative probability of the organ being chosen by a variation operator.
    double mutation_weight = 1.0;
    /// When set, the organ is never evolved directly; decode derives its
    /// strand from the named organ.
    std::optional<std::string> mirror_of;

    bool allows(std::string_view cell_type) const;
    bool mirrored() const { return mirror_of.has_value(); }
    friend bool operator==(const Organ&, const Organ&) = default;
};

struct ConnectionRule {
    int degree = 1;
    /// Legal data-flow directions; entries are organ pairs or cell-type pairs.
    std::vector<std::pair<std::string, std::string>> relations;

    bool allows(std::string_view from, std::string_view to) const;
    friend bool operator==(const ConnectionRule&, const ConnectionRule&) = default;
};

struct SearchSpace {
    std::vector<CellType> cells;
    std::vector<Organ> organs;
    ConnectionRule rule;
    /// Maximum count of each cell type in one genotype.
    std::map<std::string, int> cell_quantity_ceilings;

    const CellType* find_cell(std::string_view name) const;
    const CellType& cell(std::string_view name) const;
    const Organ* find_organ(std::string_view name) const;
    std::size_t organ_index(std::string_view name) const;
    int ceiling(std::string_view cell_type) const;

    friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

inline constexpr int kDefaultCellCeiling = 32;

struct Violation {
    std::string path;
    std::string message;
};
using Violations = std::vector<Violation>;

/// Every invariant violation of the space; empty means valid.
Violations validate_space(const SearchSpace& space);

enum class BuiltinSpace { cnn, gan, lstm };

std::optional<BuiltinSpace> parse_builtin_space(std::string_view name);
std::string_view to_string(BuiltinSpace kind);
SearchSpace builtin_space(BuiltinSpace kind);
/// Input tensor shape each built-in space is meant for (C, H, W[, T]).
std::vector<int> default_input_shape(BuiltinSpace kind);
/// Built-in whose organ names match the space, if any.
std::optional<BuiltinSpace> identify_builtin(const SearchSpace& space);

/// Cell type a mirrored organ uses in place of `source_type`.
std::string mirrored_cell_type(const SearchSpace& space, const Organ& mirrored, std::string_view source_type);

}  // namespace sane
