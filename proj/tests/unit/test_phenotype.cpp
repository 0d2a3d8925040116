#include <gtest/gtest.h>

#include "sane/phenotype.hpp"

using namespace sane;

namespace {

// Conv / transposed conv weight plus bias.
std::int64_t conv_params(std::int64_t in, std::int64_t out, std::int64_t k) { return out * (in * k * k + 1); }

std::int64_t linear_params(std::int64_t in, std::int64_t out) { return out * (in + 1); }

int conv_out(int d, int k, int s, int p) { return (d + 2 * p - k) / s + 1; }

CellGene conv_gene(int key, std::vector<int> attrs, std::vector<std::string> affiliated = {}) {
    return CellGene{key, "conv", kBoundaryKey, kBoundaryKey, std::move(attrs), std::move(affiliated)};
}

}  // namespace

TEST(ModuleParameters, SingleConv) {
    EXPECT_EQ(module_parameters({"conv", {3, 16, 3, 1, 0}, 1, "feature"}), 448);
    EXPECT_EQ(module_parameters({"conv", {3, 16, 3, 1, 0}, 1, "feature"}), conv_params(3, 16, 3));
}

TEST(ModuleParameters, SingleLinear) { EXPECT_EQ(module_parameters({"linear", {10, 10}, 1, "classifier"}), 110); }

TEST(ModuleParameters, NormsActivationsAndPools) {
    EXPECT_EQ(module_parameters({"batchnorm", {16}, 1, "f"}), 32);
    EXPECT_EQ(module_parameters({"groupnorm", {8}, 1, "f"}), 16);
    EXPECT_EQ(module_parameters({"relu", {}, 1, "f"}), 0);
    EXPECT_EQ(module_parameters({"leakyrelu", {}, 1, "f"}), 0);
    EXPECT_EQ(module_parameters({"maxpool", {2, 2}, 1, "f"}), 0);
}

TEST(ModuleParameters, ConvLstmHasFourGates) {
    // Each gate convolves [input, hidden] channels into hidden channels.
    const std::int64_t gate = conv_params(16 + 16, 16, 3);
    EXPECT_EQ(module_parameters({"convlstm", {16, 16, 3}, 1, "e"}), 4 * gate);
    EXPECT_EQ(4 * gate, 18496);
}

TEST(ParameterCount, EmptyPhenotypeIsZero) { EXPECT_EQ(parameter_count(Phenotype{}), 0); }

TEST(ParameterCount, InvariantUnderNodeOrder) {
    Phenotype p;
    p.nodes = {{"conv", {3, 16, 3, 1, 0}, 1, "f"}, {"batchnorm", {16}, 1, "f"}, {"linear", {10, 10}, 2, "c"}};
    const auto total = parameter_count(p);
    std::reverse(p.nodes.begin(), p.nodes.end());
    EXPECT_EQ(parameter_count(p), total);
    EXPECT_EQ(total, 448 + 32 + 110);
}

TEST(Decode, MinimalCnnShapesAndParameters) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const std::vector<int> input{3, 32, 32};
    const auto p = decode(minimal_genotype(space, 1), space, input);

    // conv 3x3/1/0 then 2x2 maxpool: 32 -> 30 -> 15.
    const int side = conv_out(32, 3, 1, 0) / 2;
    ASSERT_EQ(side, 15);

    ASSERT_EQ(p.nodes.size(), 6u);
    EXPECT_EQ(p.nodes[0].kind, "conv");
    EXPECT_EQ(p.nodes[1].kind, "batchnorm");
    EXPECT_EQ(p.nodes[2].kind, "relu");
    EXPECT_EQ(p.nodes[3].kind, "maxpool");
    EXPECT_EQ(p.nodes[4].kind, "linear");
    EXPECT_EQ(p.nodes[4].attrs, (std::vector<int>{16 * side * side, 32}));
    EXPECT_EQ(p.nodes[5].kind, "relu");
    EXPECT_EQ(p.output_shape, (std::vector<int>{32}));

    const std::int64_t expected = conv_params(3, 16, 3) + 2 * 16 + linear_params(16 * side * side, 32);
    EXPECT_EQ(expected, 115712);
    EXPECT_EQ(p.derived.parameter_count, expected);
    EXPECT_EQ(p.derived.layer_count, 6);
    EXPECT_EQ(p.derived.cell_count.at("conv"), 1);
    EXPECT_EQ(p.derived.cell_count.at("linear"), 1);
    EXPECT_EQ(p.edges.size(), 5u);
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        EXPECT_EQ(p.edges[i], (std::pair<int, int>(static_cast<int>(i), static_cast<int>(i) + 1)));
    }
}

TEST(Decode, NodesCarryOwningCellAndOrgan) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto g = minimal_genotype(space, 1);
    const auto p = decode(g, space, std::vector<int>{3, 32, 32});
    const int conv_key = g.strand("feature").cells[0].key;
    const int linear_key = g.strand("classifier").cells[0].key;
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(p.nodes[i].cell, conv_key);
        EXPECT_EQ(p.nodes[i].organ, "feature");
    }
    EXPECT_EQ(p.nodes[4].cell, linear_key);
    EXPECT_EQ(p.nodes[5].organ, "classifier");
}

TEST(Decode, LeNetStyleHasFiveCells) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    Genotype g = minimal_genotype(space, 1);
    auto& feature = g.strand("feature").cells;
    feature = {conv_gene(1, {8, 5, 1, 0}, {"relu", "maxpool"}), conv_gene(2, {16, 5, 1, 0}, {"relu", "maxpool"})};
    auto& classifier = g.strand("classifier").cells;
    classifier = {CellGene{3, "linear", 0, 0, {128}, {"relu"}}, CellGene{4, "linear", 0, 0, {96}, {"relu"}},
                  CellGene{5, "linear", 0, 0, {16}, {}}};
    g.next_key = 6;
    relink(g.strand("feature"));
    relink(g.strand("classifier"));
    ASSERT_TRUE(validate(g, space).empty());

    const auto p = decode(g, space, std::vector<int>{1, 32, 32});
    EXPECT_EQ(p.derived.cell_count.at("conv") + p.derived.cell_count.at("linear"), 5);
    // 32 -> 28 -> 14 -> 10 -> 5
    EXPECT_EQ(p.nodes[6].attrs, (std::vector<int>{16 * 5 * 5, 128}));
    const std::int64_t expected = conv_params(1, 8, 5) + conv_params(8, 16, 5) + linear_params(400, 128) +
                                  linear_params(128, 96) + linear_params(96, 16);
    EXPECT_EQ(p.derived.parameter_count, expected);
}

TEST(Decode, ShapeUnderflowNamesTheCell) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    Genotype g = minimal_genotype(space, 1);
    auto& feature = g.strand("feature").cells;
    feature.clear();
    for (int i = 0; i < 6; ++i) {
        feature.push_back(conv_gene(10 + i, {8, 3, 2, 1}, {}));
    }
    g.next_key = 20;
    relink(g.strand("feature"));
    ASSERT_TRUE(validate(g, space).empty());
    // 32 -> 16 -> 8 -> 4 -> 2 -> 1 -> 1 fits; a pool after the fifth cell halves 1 to 0.
    EXPECT_NO_THROW(decode(g, space, std::vector<int>{3, 32, 32}));
    feature[4].affiliated = {"maxpool"};
    try {
        decode(g, space, std::vector<int>{3, 32, 32});
        FAIL() << "expected DecodeError";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.cell_key(), 14);
        EXPECT_EQ(e.organ(), "feature");
    }
}

TEST(Decode, SixStrideTwoConvsWithoutPaddingUnderflow) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    Genotype g = minimal_genotype(space, 1);
    auto& feature = g.strand("feature").cells;
    feature.clear();
    for (int i = 0; i < 6; ++i) {
        feature.push_back(conv_gene(10 + i, {8, 2, 2, 0}, {}));
    }
    g.next_key = 20;
    relink(g.strand("feature"));
    EXPECT_THROW(decode(g, space, std::vector<int>{3, 32, 32}), DecodeError);
}

TEST(Decode, EmptyInputShapeIsRejected) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    EXPECT_THROW(decode(minimal_genotype(space, 1), space, std::vector<int>{}), std::invalid_argument);
    EXPECT_THROW(decode(minimal_genotype(space, 1), space, std::vector<int>{3, 0, 32}), std::invalid_argument);
}

TEST(Decode, MinimalGanChainsGeneratorIntoDiscriminator) {
    const auto space = builtin_space(BuiltinSpace::gan);
    const auto p = decode(minimal_genotype(space, 1), space, default_input_shape(BuiltinSpace::gan));
    // latent 100x1x1 -> convtranspose k2: 2x2 with 32 channels -> conv k2: 1x1.
    ASSERT_EQ(p.nodes.size(), 6u);
    EXPECT_EQ(p.nodes[0].attrs, (std::vector<int>{100, 32, 2, 1, 0}));
    EXPECT_EQ(p.nodes[3].attrs, (std::vector<int>{32, 32, 2, 1, 0}));
    EXPECT_EQ(p.output_shape, (std::vector<int>{32, 1, 1}));
    const std::int64_t expected = conv_params(100, 32, 2) + 64 + conv_params(32, 32, 2) + 64;
    EXPECT_EQ(p.derived.parameter_count, expected);
}

TEST(Decode, MinimalLstmMirrorsEncoder) {
    const auto space = builtin_space(BuiltinSpace::lstm);
    const auto p = decode(minimal_genotype(space, 1), space, default_input_shape(BuiltinSpace::lstm));
    ASSERT_EQ(p.nodes.size(), 4u);
    EXPECT_EQ(p.nodes[0].kind, "conv");
    EXPECT_EQ(p.nodes[2].kind, "convtranspose");
    EXPECT_EQ(p.nodes[2].organ, "decoder");
    // 64 -> 62 -> 64, time axis untouched.
    EXPECT_EQ(p.output_shape, (std::vector<int>{16, 64, 64, 10}));
    EXPECT_EQ(p.derived.parameter_count, conv_params(1, 16, 3) + conv_params(16, 16, 3));
}

TEST(Decode, MirrorReversesAndSwapsConv) {
    const auto space = builtin_space(BuiltinSpace::lstm);
    Strand encoder{"encoder",
                   {conv_gene(1, {16, 3, 1, 0}, {"leakyrelu"}), CellGene{2, "convlstm", 0, 0, {5}, {"groupnorm"}},
                    conv_gene(3, {32, 5, 2, 1}, {})}};
    relink(encoder);
    const auto decoder = mirror_strand(space, *space.find_organ("decoder"), encoder);
    ASSERT_EQ(decoder.cells.size(), 3u);
    EXPECT_EQ(decoder.organ, "decoder");
    EXPECT_EQ(decoder.cells[0].cell_type, "convtranspose");
    EXPECT_EQ(decoder.cells[0].core_attrs, (std::vector<int>{32, 5, 2, 1}));
    EXPECT_EQ(decoder.cells[1].cell_type, "convlstm");
    EXPECT_EQ(decoder.cells[1].core_attrs, (std::vector<int>{5}));
    EXPECT_EQ(decoder.cells[2].cell_type, "convtranspose");
    EXPECT_EQ(decoder.cells[2].affiliated, (std::vector<std::string>{"leakyrelu"}));
}

TEST(Decode, BuiltinMinimalsNeverFail) {
    for (auto kind : {BuiltinSpace::cnn, BuiltinSpace::gan, BuiltinSpace::lstm}) {
        const auto space = builtin_space(kind);
        EXPECT_NO_THROW(decode(minimal_genotype(space, 1), space, default_input_shape(kind))) << to_string(kind);
    }
}
