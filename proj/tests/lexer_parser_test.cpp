#include <gtest/gtest.h>

#include "test_support.hpp"

namespace bb84mc {
namespace {

using test::capture_error;
using test::read_data;

const Command& only_command(const ModelAst& ast, const std::string& module) {
    for (const auto& m : ast.modules) {
        if (m.name == module) return m.commands.at(0);
    }
    throw std::runtime_error("no module " + module);
}

TEST(Lexer, RangeDotsSplitFromIntegers) {
    auto toks = tokenize("[0..1]");
    ASSERT_EQ(toks.size(), 6u);
    EXPECT_EQ(toks[1].kind, Tok::Int);
    EXPECT_EQ(toks[1].int_value, 0);
    EXPECT_EQ(toks[2].kind, Tok::DotDot);
    EXPECT_EQ(toks[3].int_value, 1);
    EXPECT_EQ(toks[5].kind, Tok::End);
}

TEST(Lexer, NumbersAndComments) {
    auto toks = tokenize("0.25 1e-3 7 // trailing comment\n'");
    EXPECT_EQ(toks[0].kind, Tok::Real);
    EXPECT_DOUBLE_EQ(toks[0].real_value, 0.25);
    EXPECT_EQ(toks[1].kind, Tok::Real);
    EXPECT_DOUBLE_EQ(toks[1].real_value, 1e-3);
    EXPECT_EQ(toks[2].kind, Tok::Int);
    EXPECT_EQ(toks[3].kind, Tok::Prime);
    EXPECT_EQ(toks[3].pos.line, 2);
}

TEST(Lexer, OperatorsAndPositions) {
    auto toks = tokenize("x<=1 & y!=2 -> \"lbl\"");
    EXPECT_EQ(toks[1].kind, Tok::Le);
    EXPECT_EQ(toks[3].kind, Tok::And);
    EXPECT_EQ(toks[5].kind, Tok::Ne);
    EXPECT_EQ(toks[7].kind, Tok::Arrow);
    EXPECT_EQ(toks[8].kind, Tok::String);
    EXPECT_EQ(toks[8].text, "lbl");
    EXPECT_EQ(toks[4].pos.column, 8);
}

TEST(Parser, PerfectChannelCommandHasOneUpdateWithThreeAssignments) {
    ModelAst ast = parse(read_data("perfect_channel.pm"));
    const Command& cmd = only_command(ast, "QuantumChannel");
    EXPECT_EQ(cmd.action, "aliceput");
    ASSERT_EQ(cmd.updates.size(), 1u);
    EXPECT_EQ(cmd.updates[0].probability, nullptr);
    ASSERT_EQ(cmd.updates[0].assignments.size(), 3u);
    EXPECT_EQ(cmd.updates[0].assignments[0].variable, "ch_state");
    EXPECT_EQ(cmd.updates[0].assignments[1].variable, "ch_bas");
    EXPECT_EQ(cmd.updates[0].assignments[2].variable, "ch_bit");
    EXPECT_TRUE(structurally_equal(cmd.guard, parse_expression("ch_state=0")));
}

TEST(Parser, NoisyChannelCommandKeepsFourWeightedUpdatesInOrder) {
    ModelAst ast = parse(read_data("noisy_channel.pm"));
    const Command& cmd = only_command(ast, "QuantumChannel");
    ASSERT_EQ(cmd.updates.size(), 4u);
    const double weights[] = {0.7, 0.1, 0.1, 0.1};
    const char* bases[] = {"al_bas", "1-al_bas", "al_bas", "1-al_bas"};
    for (int k = 0; k < 4; ++k) {
        ASSERT_NE(cmd.updates[k].probability, nullptr);
        EXPECT_TRUE(structurally_equal(cmd.updates[k].probability, make_expr(RealLit{weights[k]})));
        EXPECT_TRUE(structurally_equal(cmd.updates[k].assignments[1].value, parse_expression(bases[k])));
    }
}

TEST(Parser, EveListingsParse) {
    for (const char* name : {"full_attack.pm", "weak_attack.pm", "medium_attack.pm",
                             "very_noisy_channel.pm"}) {
        SCOPED_TRACE(name);
        ModelAst ast = parse(read_data(name));
        EXPECT_EQ(ast.modules.size(), 3u);
        EXPECT_EQ(ast.labels.size(), 1u);
    }
    const Command& weak = only_command(parse(read_data("weak_attack.pm")), "QuantumChannel");
    ASSERT_EQ(weak.updates.size(), 2u);
    EXPECT_TRUE(structurally_equal(weak.updates[1].probability, make_expr(RealLit{0.8})));
}

TEST(Parser, MissingArrowIsSyntaxErrorNamingLineAndExpectation) {
    ModelError e = capture_error([] { parse(read_data("malformed/missing_arrow.pm")); });
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_EQ(e.pos().line, 6);
    EXPECT_NE(std::string(e.what()).find("'->'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("6:"), std::string::npos) << e.what();
}

TEST(Parser, OperatorPrecedence) {
    auto e = parse_expression("a | b & !c = 1 + 2 * -d");
    const auto& top = std::get<Binary>(e->node);
    EXPECT_EQ(top.op, BinaryOp::Or);
    const auto& conj = std::get<Binary>(top.rhs->node);
    EXPECT_EQ(conj.op, BinaryOp::And);
    const auto& neg = std::get<Unary>(conj.rhs->node);
    EXPECT_EQ(neg.op, UnaryOp::Not);
    const auto& cmp = std::get<Binary>(neg.operand->node);
    EXPECT_EQ(cmp.op, BinaryOp::Eq);
    const auto& sum = std::get<Binary>(cmp.rhs->node);
    EXPECT_EQ(sum.op, BinaryOp::Add);
    EXPECT_EQ(std::get<Binary>(sum.rhs->node).op, BinaryOp::Mul);
}

TEST(Parser, SubtractionIsLeftAssociative) {
    EXPECT_TRUE(structurally_equal(parse_expression("a-b-c"), parse_expression("(a-b)-c")));
    EXPECT_FALSE(structurally_equal(parse_expression("a-b-c"), parse_expression("a-(b-c)")));
}

TEST(Parser, ComparisonsDoNotChain) {
    EXPECT_EQ(capture_error([] { parse_expression("a < b < c"); }).kind(), ErrorKind::Syntax);
}

TEST(Parser, ConstantsAndNegativeBounds) {
    ModelAst ast = parse(
        "dtmc\nconst int n = 3;\nconst double p = 0.5;\n"
        "module m\n  x : [-2..3] init -1;\n  [] x<n -> p : (x'=x+1) + 1-p : (x'=x);\nendmodule\n");
    ASSERT_EQ(ast.constants.size(), 2u);
    EXPECT_EQ(std::get<std::int64_t>(ast.constants[0].value), 3);
    EXPECT_EQ(std::get<double>(ast.constants[1].value), 0.5);
    EXPECT_EQ(ast.modules[0].variables[0].low, -2);
    EXPECT_EQ(ast.modules[0].variables[0].init, -1);
}

TEST(Parser, VariableBoundMustBeLiteral) {
    auto e = capture_error([] { parse("dtmc\nconst int n = 3;\nmodule m\n  x : [0..n] init 0;\nendmodule\n"); });
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_EQ(e.pos().line, 4);
}

TEST(Parser, MultiBranchCommandRequiresProbabilities) {
    auto e = capture_error(
        [] { parse("dtmc\nmodule m\n  x : [0..1] init 0;\n  [] x=0 -> (x'=1) + (x'=0);\nendmodule\n"); });
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
}

TEST(Parser, UpdateStartingWithParenthesizedProbability) {
    ModelAst ast = parse("dtmc\nmodule m\n  x : [0..1] init 0;\n  [] x=0 -> (0.5) : (x'=1) + (1-0.5) : (x'=0);\nendmodule\n");
    EXPECT_EQ(ast.modules[0].commands[0].updates.size(), 2u);
}

TEST(Parser, DuplicateDeclarations) {
    EXPECT_EQ(capture_error([] { parse("dtmc\nmodule m\n  x : [0..1] init 0;\n  x : [0..1] init 0;\nendmodule\n"); })
                  .kind(),
              ErrorKind::DuplicateDeclaration);
    EXPECT_EQ(capture_error([] {
                  parse("dtmc\nmodule a\n  x : [0..1] init 0;\nendmodule\nmodule b\n  x : [0..1] init 0;\nendmodule\n");
              }).kind(),
              ErrorKind::DuplicateDeclaration);
    EXPECT_EQ(capture_error([] { parse("dtmc\nconst int m = 1;\nmodule m\nendmodule\n"); }).kind(),
              ErrorKind::DuplicateDeclaration);
    EXPECT_EQ(capture_error([] {
                  parse("dtmc\nmodule m\n  x : [0..1] init 0;\nendmodule\nlabel \"a\" = x=0;\nlabel \"a\" = x=1;\n");
              }).kind(),
              ErrorKind::DuplicateDeclaration);
}

TEST(Parser, UnknownIdentifiers) {
    auto in_guard = capture_error([] { parse("dtmc\nmodule m\n  x : [0..1] init 0;\n  [] y=0 -> (x'=1);\nendmodule\n"); });
    EXPECT_EQ(in_guard.kind(), ErrorKind::UnknownIdentifier);
    EXPECT_EQ(in_guard.pos().line, 4);
    EXPECT_EQ(capture_error([] { parse("dtmc\nmodule m\n  x : [0..1] init 0;\n  [] x=0 -> (z'=1);\nendmodule\n"); })
                  .kind(),
              ErrorKind::UnknownIdentifier);
    EXPECT_EQ(capture_error([] { parse("dtmc\nmodule m\n  x : [0..1] init 0;\nendmodule\nlabel \"l\" = m=0;\n"); })
                  .kind(),
              ErrorKind::UnknownIdentifier);
}

TEST(Parser, KeywordsAreNotIdentifiers) {
    EXPECT_EQ(capture_error([] { parse("dtmc\nmodule m\n  init : [0..1] init 0;\nendmodule\n"); }).kind(),
              ErrorKind::Syntax);
}

TEST(Parser, MissingHeaderAndTrailingGarbage) {
    EXPECT_EQ(capture_error([] { parse("module m\nendmodule\n"); }).kind(), ErrorKind::Syntax);
    EXPECT_EQ(capture_error([] { parse("dtmc\nmodule m\nendmodule\nendmodule\n"); }).kind(), ErrorKind::Syntax);
}

TEST(Parser, UnexpectedEndOfInput) {
    auto e = capture_error([] { parse("dtmc\nmodule m\n  x : [0..1] init 0;\n  [] x=0 -> (x'=1)"); });
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos);
}

TEST(Parser, PositionsPointAtTokens) {
    ModelAst ast = parse(read_data("toy_chain.pm"));
    const Command& cmd = ast.modules[0].commands[0];
    EXPECT_EQ(cmd.pos.line, 7);
    EXPECT_EQ(cmd.pos.column, 3);
    EXPECT_EQ(ast.labels[0].pos.line, 10);
}

TEST(Diagnostics, WhatIncludesKindAndPosition) {
    ModelError e(ErrorKind::ProbSum, SourcePos{3, 7}, "sums to 0.9");
    EXPECT_STREQ(e.what(), "3:7: PROB_SUM: sums to 0.9");
    ModelError bare(ErrorKind::InvalidParameter, "bad");
    EXPECT_EQ(std::string(bare.what()).find("INVALID_PARAMETER"), 0u);
}

}  // namespace
}  // namespace bb84mc
