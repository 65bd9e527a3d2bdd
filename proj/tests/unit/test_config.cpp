#include <fstream>

#include <gtest/gtest.h>

#include "gha/config.hpp"
#include "gha/error.hpp"
#include "json.hpp"

namespace gha {
namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::IoError;
}

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST(ParseConfig, MinimalDefaults) {
  const auto cfg = parse_config_text(R"({"model": "infinite_well"})");
  EXPECT_EQ(cfg.model.kind, ModelKind::InfiniteWell);
  EXPECT_EQ(cfg.N, 64);
  EXPECT_EQ(cfg.margin, 8);
  EXPECT_EQ(cfg.grid.n_points, 2000);
  EXPECT_EQ(cfg.tolerances.algebra, 1e-10);
  EXPECT_EQ(cfg.tolerances.eigen, 1e-3);
  EXPECT_EQ(cfg.tolerances.quadrature, 1e-8);
  EXPECT_EQ(cfg.tolerances.biorthogonality, 1e-8);
  EXPECT_EQ(cfg.family_depth(), 55);
}

TEST(ParseConfig, FullDocument) {
  const auto cfg = parse_config_text(R"({
    "schema_version": 1,
    "model": "poschl_teller",
    "lambda": 2.5,
    "deformation": {"kind": "rational_pt"},
    "truncation": {"N": 40, "margin": 5},
    "grid": {"n_points": 500},
    "n_max": 20,
    "tolerances": {"algebra": 1e-9, "eigen": 2e-3},
    "seed": 11,
    "outputs": ["spectrum"]
  })");
  EXPECT_EQ(cfg.model.kind, ModelKind::PoschlTeller);
  EXPECT_EQ(cfg.model.lambda, 2.5);
  ASSERT_TRUE(cfg.model.deformation);
  EXPECT_EQ(cfg.model.deformation->kind, SimilarityRecipe::Kind::MultiplicationFunction);
  EXPECT_EQ(cfg.N, 40);
  EXPECT_EQ(cfg.margin, 5);
  EXPECT_EQ(cfg.grid.n_points, 500);
  EXPECT_EQ(cfg.family_depth(), 20);
  EXPECT_EQ(cfg.tolerances.algebra, 1e-9);
  EXPECT_EQ(cfg.tolerances.quadrature, 1e-8);
  EXPECT_EQ(cfg.seed, 11u);
}

TEST(ParseConfig, MarginDefaultsToEighth) {
  EXPECT_EQ(parse_config_text(R"({"model": "infinite_well", "truncation": {"N": 32}})").margin, 4);
}

TEST(ParseConfig, DiagonalRecipe) {
  const auto cfg = parse_config_text(
      R"({"model": "quon", "q": 0.5, "deformation": {"kind": "diagonal_of_number", "sigma": {"kind": "tanh_shift"}}})");
  ASSERT_TRUE(cfg.model.deformation);
  EXPECT_EQ(cfg.model.deformation->kind, SimilarityRecipe::Kind::DiagonalOfNumber);
  EXPECT_EQ(cfg.model.deformation->profile.kind, Profile::Kind::TanhShift);
}

TEST(ParseConfig, ConstraintViolations) {
  EXPECT_EQ(code_of(R"({"model": "poschl_teller", "lambda": 0.5})"), ErrorCode::ValidationError);
  EXPECT_EQ(code_of(R"({"model": "quon", "q": 1.2})"), ErrorCode::ValidationError);
  EXPECT_EQ(code_of(R"({"model": "infinite_well", "grid": {"n_points": 8}})"), ErrorCode::ValidationError);
  EXPECT_EQ(code_of(R"({"model": "infinite_well", "truncation": {"N": 8, "margin": 8}})"), ErrorCode::ValidationError);
  EXPECT_EQ(code_of(R"({"model": "infinite_well", "tolerances": {"eigen": 0}})"), ErrorCode::ValidationError);
}

TEST(ParseConfig, UnknownKeysRejected) {
  const auto msg = message_of(R"({"model": "infinite_well", "colour": "blue", "grid": {"spacing": 0.1}})");
  EXPECT_NE(msg.find("colour"), std::string::npos);
  EXPECT_NE(msg.find("grid.spacing"), std::string::npos);
}

TEST(ParseConfig, AllViolationsListed) {
  const auto msg = message_of(R"({"model": "quon", "q": 1.5, "grid": {"n_points": 4}, "outputs": ["plots"]})");
  EXPECT_NE(msg.find("3 violation(s)"), std::string::npos) << msg;
}

TEST(ParseConfig, SeparateCharacteristicFunctionsExplained) {
  const auto msg = message_of(R"({"model": "infinite_well", "f_a": "sqrt_shift"})");
  EXPECT_NE(msg.find("separate characteristic functions"), std::string::npos) << msg;
}

TEST(ParseConfig, ParameterForWrongModel) {
  EXPECT_NE(message_of(R"({"model": "infinite_well", "q": 0.5})").find("'q' applies only to quon"), std::string::npos);
}

TEST(ParseConfig, SyntaxErrorCarriesLine) {
  const std::string text = "{\n  \"model\": \"infinite_well\",\n  \"seed\": ,\n}";
  try {
    parse_config_text(text, "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("bad.json:3"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, TypeErrorNamesField) {
  const std::string text = "{\n  \"model\": \"infinite_well\",\n  \"truncation\": {\"N\": \"many\"}\n}";
  try {
    parse_config_text(text, "typed.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("N"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("typed.json:3"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, UnsupportedSchemaVersion) {
  EXPECT_EQ(code_of(R"({"schema_version": 2, "model": "infinite_well"})"), ErrorCode::ValidationError);
}

TEST(ParseConfig, MissingFileIsIoError) {
  try {
    parse_config("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(RunConfig, EchoRoundTrips) {
  const auto cfg = parse_config_text(
      R"({"model": "infinite_well", "deformation": {"kind": "inverse_cosine", "alpha": 3.0, "k0": 2}, "seed": 5})");
  const std::string echo = cfg.to_json();
  const auto again = parse_config_text(echo);
  EXPECT_EQ(again.to_json(), echo);
  const auto j = nlohmann::json::parse(echo);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["truncation"]["N"], 64);
}

TEST(RunConfig, ResolvedGridFollowsModel) {
  const auto well = parse_config_text(R"({"model": "infinite_well", "grid": {"n_points": 100}})");
  EXPECT_EQ(well.resolved_grid().x_min, 0.0);
  EXPECT_EQ(well.resolved_grid().n_points, 100);
  const auto quon = parse_config_text(R"({"model": "quon", "q": 0.5})");
  EXPECT_THROW(quon.resolved_grid(), Error);
}

}  // namespace
}  // namespace gha
