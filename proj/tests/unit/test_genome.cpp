#include <gtest/gtest.h>

#include <algorithm>

#include "sane/genome.hpp"

using namespace sane;

namespace {

bool mentions(const Violations& v, const std::string& text) {
    return std::any_of(v.begin(), v.end(),
                       [&](const Violation& x) { return x.message.find(text) != std::string::npos; });
}

}  // namespace

TEST(Genome, MinimalCnnHasOneCellPerOrgan) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto g = minimal_genotype(space, 7);
    EXPECT_EQ(g.id, 7);
    ASSERT_EQ(g.strands.size(), 2u);
    EXPECT_EQ(g.count("feature", "conv"), 1);
    EXPECT_EQ(g.count("classifier", "linear"), 1);
    EXPECT_EQ(g.cell_count(), 2u);
    EXPECT_TRUE(validate(g, space).empty());
    EXPECT_GT(g.next_key, 2);
}

TEST(Genome, MinimalLstmLeavesMirrorEmpty) {
    const auto space = builtin_space(BuiltinSpace::lstm);
    const auto g = minimal_genotype(space, 1);
    EXPECT_EQ(g.strand("encoder").cells.size(), 1u);
    EXPECT_TRUE(g.strand("decoder").cells.empty());
    EXPECT_TRUE(validate(g, space).empty());
}

TEST(Genome, CellOutsideOrganIsRejected) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    g.strand("feature").cells[0].cell_type = "linear";
    g.strand("feature").cells[0].core_attrs = {32};
    g.strand("feature").cells[0].affiliated = {};
    EXPECT_TRUE(mentions(validate(g, space), "not allowed in organ"));
}

TEST(Genome, CeilingExceeded) {
    auto space = builtin_space(BuiltinSpace::cnn);
    space.cell_quantity_ceilings["conv"] = 1;
    auto g = minimal_genotype(space, 1);
    auto& cells = g.strand("feature").cells;
    auto extra = cells[0];
    extra.key = g.next_key++;
    cells.push_back(extra);
    relink(g.strand("feature"));
    EXPECT_TRUE(mentions(validate(g, space), "ceiling exceeded"));
}

TEST(Genome, CycleIsRejected) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    auto& strand = g.strand("feature");
    auto second = strand.cells[0];
    second.key = g.next_key++;
    strand.cells.push_back(second);
    relink(strand);
    // Close the chain into a loop.
    strand.cells.front().in_key = strand.cells.back().key;
    strand.cells.back().out_key = strand.cells.front().key;
    EXPECT_TRUE(mentions(validate(g, space), "cycle"));
}

TEST(Genome, EmptyStrandRejected) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    g.strand("classifier").cells.clear();
    EXPECT_TRUE(mentions(validate(g, space), "strand is empty"));
}

TEST(Genome, MirroredStrandMustBeEmpty) {
    const auto space = builtin_space(BuiltinSpace::lstm);
    auto g = minimal_genotype(space, 1);
    auto cell = g.strand("encoder").cells[0];
    cell.key = g.next_key++;
    cell.cell_type = "convtranspose";
    g.strand("decoder").cells.push_back(cell);
    EXPECT_TRUE(mentions(validate(g, space), "mirrored organ strand must be empty"));
}

TEST(Genome, AttributeOutsideDomain) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    g.strand("feature").cells[0].core_attrs[2] = 0;
    EXPECT_TRUE(mentions(validate(g, space), "outside domain"));
}

TEST(Genome, DuplicateAffiliatedRejected) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    g.strand("feature").cells[0].affiliated.push_back("relu");
    EXPECT_TRUE(mentions(validate(g, space), "duplicate"));
}

TEST(Genome, StaleNextKeyRejected) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    g.next_key = 1;
    EXPECT_TRUE(mentions(validate(g, space), "next key"));
}

TEST(Genome, RelinkBuildsChain) {
    Strand s{"feature", {}};
    for (int k : {5, 9, 2}) {
        s.cells.push_back(CellGene{k, "conv", 0, 0, {16, 3, 1, 0}, {}});
    }
    relink(s);
    EXPECT_EQ(s.cells[0].in_key, kBoundaryKey);
    EXPECT_EQ(s.cells[0].out_key, 9);
    EXPECT_EQ(s.cells[1].in_key, 5);
    EXPECT_EQ(s.cells[1].out_key, 2);
    EXPECT_EQ(s.cells[2].out_key, kBoundaryKey);
}

TEST(Genome, RenumberKeepsStructure) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto g = minimal_genotype(space, 1);
    for (auto& s : g.strands) {
        for (auto& c : s.cells) {
            c.key += 40;
        }
        relink(s);
    }
    g.next_key = 100;
    renumber_keys(g);
    EXPECT_EQ(g.strand("feature").cells[0].key, 1);
    EXPECT_EQ(g.strand("classifier").cells[0].key, 2);
    EXPECT_TRUE(validate(g, space).empty());
}

TEST(Genome, StructuralEqualityIgnoresIdentity) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    auto a = minimal_genotype(space, 1);
    auto b = minimal_genotype(space, 2);
    b.birth_generation = 9;
    b.fitness = FitnessRecord{0.5, std::nullopt, 3, false};
    EXPECT_TRUE(structurally_equal(a, b));
    b.strand("feature").cells[0].core_attrs[0] = 24;
    EXPECT_FALSE(structurally_equal(a, b));
}

TEST(Genome, CellCountsByOrganAndType) {
    const auto space = builtin_space(BuiltinSpace::lstm);
    auto g = minimal_genotype(space, 1);
    auto& cells = g.strand("encoder").cells;
    cells.push_back(CellGene{g.next_key++, "convlstm", 0, 0, {3}, {"groupnorm"}});
    relink(g.strand("encoder"));
    const auto counts = cell_counts(g);
    EXPECT_EQ(counts.at({"encoder", "conv"}), 1);
    EXPECT_EQ(counts.at({"encoder", "convlstm"}), 1);
    EXPECT_EQ(counts.count({"decoder", "convtranspose"}), 0u);
    EXPECT_EQ(g.count_type("convlstm"), 1);
}
