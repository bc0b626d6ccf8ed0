#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "specdec/program.hpp"

using namespace specdec;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_code(const std::vector<Diagnostic>& diags, const std::string& code) {
    for (const auto& d : diags)
        if (d.code == code) return true;
    return false;
}

}  // namespace

TEST(Program, MinimalIdle) {
    const Program p = parse_program(R"({"format":1,"distance":3,"grid":{"rows":1,"cols":1},
        "instructions":[{"kind":"Idle","patches":[[0,0]],"start_round":0,"duration":3}]})");
    ASSERT_EQ(p.instructions.size(), 1u);
    EXPECT_EQ(p.instructions[0].duration, 3);
    EXPECT_EQ(p.round_time_us, 1.0);
}

TEST(Program, DanglingConditional) {
    const std::string doc = R"({"format":1,"distance":3,"grid":{"rows":1,"cols":2},"instructions":[
        {"kind":"SGate","patches":[[0,0]],"start_round":0,"duration":2,"conditional_on":1},
        {"kind":"TTeleport","patches":[[0,1]],"start_round":0,"duration":3}]})";
    try {
        parse_program(doc);
        FAIL() << "expected ProgramError";
    } catch (const ProgramError& e) {
        EXPECT_TRUE(has_code(e.diagnostics(), "dangling_conditional"));
        EXPECT_NE(std::string(e.what()).find("dangling conditional"), std::string::npos);
    }
}

TEST(Program, SchemaErrorNamesField) {
    try {
        parse_program(R"({"format":1,"distance":3,"grid":{"rows":1,"cols":1},"instructions":[{"kind":"Nope"}]})");
        FAIL() << "expected ProgramError";
    } catch (const ProgramError& e) {
        EXPECT_NE(std::string(e.what()).find("instruction 0"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_program("{not json"), ProgramError);
    EXPECT_THROW(parse_program(R"({"distance":3})"), ProgramError);
}

TEST(Program, ValidateOverlapAndParity) {
    Program p;
    p.distance = 5;
    p.grid = {1, 2};
    p.instructions.push_back({InstructionKind::MergeZZ, {{0, 0}, {0, 1}}, 0, 5});
    p.instructions.push_back({InstructionKind::MergeXX, {{0, 0}, {0, 1}}, 3, 5});
    const auto diags = validate(p);
    EXPECT_TRUE(has_code(diags, "overlap"));

    Program q = p;
    q.instructions.pop_back();
    EXPECT_TRUE(validate(q).empty());
    q.distance = 4;
    EXPECT_TRUE(has_code(validate(q), "distance_parity"));
}

TEST(Program, BuiltinCounts) {
    EXPECT_EQ(builtin_program(BuiltinName::Msd15To1, {7, 1}).count(InstructionKind::TTeleport), 15);
    const Program rt = builtin_program(BuiltinName::RepeatedT, {11, 1000});
    EXPECT_EQ(rt.count(InstructionKind::TTeleport), 1000);
    EXPECT_EQ(rt.count(InstructionKind::SGate), 1000);
    for (std::size_t i = 0; i < rt.instructions.size(); ++i)
        if (rt.instructions[i].kind == InstructionKind::SGate) {
            ASSERT_TRUE(rt.instructions[i].conditional_on);
            EXPECT_EQ(rt.instructions[*rt.instructions[i].conditional_on].kind, InstructionKind::TTeleport);
        }
    for (auto name : {BuiltinName::RepeatedT, BuiltinName::Msd15To1, BuiltinName::ZigzagChain, BuiltinName::Toffoli})
        EXPECT_TRUE(validate(builtin_program(name, {7, 3})).empty()) << to_string(name);
}

TEST(Program, BuiltinDeterministicAndValidated) {
    EXPECT_EQ(builtin_program(BuiltinName::Msd15To1, {7, 1}), builtin_program(BuiltinName::Msd15To1, {7, 1}));
    EXPECT_THROW(builtin_program(BuiltinName::RepeatedT, {4, 1}), std::invalid_argument);
    EXPECT_THROW(builtin_program(BuiltinName::RepeatedT, {5, 0}), std::invalid_argument);
    EXPECT_FALSE(builtin_name_from_string("nope"));
}

TEST(Program, RoundTrip) {
    for (auto name : {BuiltinName::RepeatedT, BuiltinName::Msd15To1, BuiltinName::ZigzagChain, BuiltinName::Toffoli}) {
        const Program p = builtin_program(name, {5, 4});
        EXPECT_EQ(parse_program(serialize_program(p)), p) << to_string(name);
    }
}

// The bundled file re-serializes to its normalized form: same JSON value, and
// equal to the builtin it was exported from.
TEST(Program, BundledMsdFile) {
    const std::string text = read_file(SPECDEC_PROGRAMS_DIR "/msd_15to1.json");
    ASSERT_FALSE(text.empty());
    const Program p = parse_program(text);
    EXPECT_TRUE(validate(p).empty());
    EXPECT_EQ(nlohmann::json::parse(serialize_program(p)), nlohmann::json::parse(text));
    EXPECT_EQ(p, builtin_program(BuiltinName::Msd15To1, {7, 1}));
}

TEST(Program, Exclusivity) {
    // At most one instruction per (patch, round) on every builtin.
    for (auto name : {BuiltinName::RepeatedT, BuiltinName::Msd15To1, BuiltinName::ZigzagChain, BuiltinName::Toffoli}) {
        const Program p = builtin_program(name, {5, 3});
        std::map<std::pair<int, int>, int> used;
        for (const auto& ins : p.instructions)
            for (const auto& patch : ins.patches)
                for (int t = ins.start_round; t < ins.end_round(); ++t) EXPECT_EQ(used[std::make_pair(p.patch_index(patch), t)]++, 0);
    }
}
