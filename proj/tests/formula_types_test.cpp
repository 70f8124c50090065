#include "vrf/error.hpp"
#include "vrf/formula.hpp"

#include <gtest/gtest.h>

using namespace vrf::formula;

namespace {

TypeTag infer_text(const char* text, const TypeMap& types) { return infer(parse(text), types); }

std::string type_error(const char* text, const TypeMap& types) {
    try {
        infer(parse(text), types);
    } catch (const vrf::TypeError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Infer, SinOfRealIsReal) { EXPECT_EQ(infer_text("sin(a)", {{"a", TypeTag::real()}}), TypeTag::real()); }

TEST(Infer, SinOfVectorIsVector) {
    EXPECT_EQ(infer_text("sin(a)", {{"a", TypeTag::vector(3)}}), TypeTag::vector(3));
}

TEST(Infer, InnerDimensionMismatch) {
    const auto msg = type_error("a*b", {{"a", TypeTag::matrix(2, 3)}, {"b", TypeTag::matrix(4, 2)}});
    EXPECT_NE(msg.find("dimension mismatch"), std::string::npos) << msg;
}

TEST(Infer, MatrixPlusBooleanIsTypeMismatch) {
    const auto msg = type_error("m + b", {{"m", TypeTag::matrix(2, 2)}, {"b", TypeTag::boolean()}});
    EXPECT_NE(msg.find("type mismatch"), std::string::npos) << msg;
}

TEST(Infer, UnknownVariable) {
    const auto msg = type_error("x + 1", {});
    EXPECT_NE(msg.find("unknown variable 'x'"), std::string::npos) << msg;
}

TEST(Infer, CaseSensitiveLookup) { EXPECT_FALSE(type_error("X", {{"x", TypeTag::real()}}).empty()); }

TEST(Infer, QuadraticFormIsScalar) {
    const TypeMap types{{"f", TypeTag::vector(2)}, {"a", TypeTag::matrix(2, 2)}};
    EXPECT_EQ(infer_text("f'", types), TypeTag::matrix(1, 2));
    EXPECT_EQ(infer_text("f' * a", types), TypeTag::matrix(1, 2));
    EXPECT_EQ(infer_text("f' * a * f", types), TypeTag::real());
    EXPECT_EQ(infer_text("a * f", types), TypeTag::vector(2));
}

TEST(Infer, KalmanUpdateForm) {
    const TypeMap types{{"q", TypeTag::matrix(3, 3)}, {"h", TypeTag::matrix(3, 3)}};
    EXPECT_EQ(infer_text("inv(inv(q) + h)", types), TypeTag::matrix(3, 3));
    EXPECT_FALSE(type_error("inv(m)", {{"m", TypeTag::matrix(2, 3)}}).empty());
}

TEST(Infer, UnknownDimensionsDeferToEval) {
    const TypeMap types{{"q", TypeTag::matrix()}, {"h", TypeTag::matrix(2, 2)}, {"v", TypeTag::vector()}};
    EXPECT_EQ(infer_text("inv(q) + h", types), TypeTag::matrix(2, 2));
    EXPECT_EQ(infer_text("q * v", types), TypeTag::unknown());
    EXPECT_EQ(infer_text("h * v", types), TypeTag::vector(2));
}

TEST(Infer, IntegerPromotion) {
    const TypeMap types{{"i", TypeTag::integer()}, {"x", TypeTag::real()}};
    EXPECT_EQ(infer_text("i + 2", types), TypeTag::integer());
    EXPECT_EQ(infer_text("i * 2", types), TypeTag::integer());
    EXPECT_EQ(infer_text("i / 2", types), TypeTag::real());
    EXPECT_EQ(infer_text("i + x", types), TypeTag::real());
    EXPECT_EQ(infer_text("i ^ 2", types), TypeTag::real());
}

TEST(Infer, BroadcastingShapes) {
    const TypeMap types{{"v", TypeTag::vector(3)}, {"w", TypeTag::vector(4)}, {"s", TypeTag::real()},
                        {"m", TypeTag::matrix(2, 2)}};
    EXPECT_EQ(infer_text("v + s", types), TypeTag::vector(3));
    EXPECT_EQ(infer_text("s / v", types), TypeTag::vector(3));
    EXPECT_EQ(infer_text("v ^ v", types), TypeTag::vector(3));
    EXPECT_EQ(infer_text("2 * m", types), TypeTag::matrix(2, 2));
    EXPECT_EQ(infer_text("max(v, s)", types), TypeTag::vector(3));
    EXPECT_FALSE(type_error("v + w", types).empty());
    EXPECT_FALSE(type_error("v * v", types).empty());
    EXPECT_FALSE(type_error("v * m", types).empty());
    EXPECT_FALSE(type_error("m ^ 2", types).empty());
}

TEST(Infer, CrossDeltaAndComparisons) {
    const TypeMap types{{"a", TypeTag::vector(3)}, {"p", TypeTag::vector(2)}, {"t", TypeTag::real()}};
    EXPECT_EQ(infer_text("cross(a, a)", types), TypeTag::vector(3));
    EXPECT_FALSE(type_error("cross(a, p)", types).empty());
    EXPECT_EQ(infer_text("delta(t - 1)", types), TypeTag::real());
    EXPECT_FALSE(type_error("delta(a)", types).empty());
    EXPECT_EQ(infer_text("t < 1 && !(t == 2)", types), TypeTag::boolean());
    EXPECT_FALSE(type_error("a < 1", types).empty());
    EXPECT_FALSE(type_error("t && true", types).empty());
}

TEST(Infer, FunctionValuesAndComposition) {
    const TypeMap types{{"g", TypeTag::function(1)}, {"x", TypeTag::real()}, {"v", TypeTag::vector(2)}};
    EXPECT_EQ(infer_text("sin(g)", types), TypeTag::function(1));
    EXPECT_EQ(infer_text("sin(sqr)", types), TypeTag::function(1));
    EXPECT_EQ(infer_text("sin(g)(x)", types), TypeTag::real());
    EXPECT_EQ(infer_text("g(v)", types), TypeTag::vector(2));
    EXPECT_EQ(infer_text("max(g, 0)", types), TypeTag::function(1));
    EXPECT_FALSE(type_error("max(g, atan2)", types).empty());
    EXPECT_FALSE(type_error("max(g, v)", types).empty());
    EXPECT_FALSE(type_error("x(1)", types).empty());
    EXPECT_FALSE(type_error("sin(x, x)", types).empty());
}

TEST(Infer, ArrayLiterals) {
    const TypeMap types{{"x", TypeTag::real()}, {"v", TypeTag::vector(2)}};
    EXPECT_EQ(infer_text("[x, 1, 2]", types), TypeTag::vector(3));
    EXPECT_EQ(infer_text("[v, v, v]", types), TypeTag::matrix(3, 2));
    EXPECT_FALSE(type_error("[x, v]", types).empty());
}

TEST(TypeTagUnify, DimensionsUnifyWhenEqualOrUnknown) {
    EXPECT_TRUE(TypeTag::vector(3).unifies_with(TypeTag::vector()));
    EXPECT_TRUE(TypeTag::vector(3).unifies_with(TypeTag::vector(3)));
    EXPECT_FALSE(TypeTag::vector(3).unifies_with(TypeTag::vector(2)));
    EXPECT_TRUE(TypeTag::matrix(2, std::nullopt).unifies_with(TypeTag::matrix(2, 5)));
    EXPECT_FALSE(TypeTag::matrix(2, 2).unifies_with(TypeTag::vector(2)));
    EXPECT_TRUE(TypeTag::unknown().unifies_with(TypeTag::matrix(1, 1)));
    EXPECT_FALSE(TypeTag::unknown().unifies_with(TypeTag::boolean()));
    EXPECT_TRUE(TypeTag::integer().unifies_with(TypeTag::real()));
    EXPECT_FALSE(TypeTag::function(1).unifies_with(TypeTag::function(2)));
}

TEST(TypeTagText, ParseInvertsToString) {
    for (const TypeTag& t : {TypeTag::boolean(), TypeTag::integer(), TypeTag::real(), TypeTag::unknown(),
                             TypeTag::vector(3), TypeTag::vector(), TypeTag::matrix(2, 4), TypeTag::matrix(std::nullopt, 1),
                             TypeTag::function(3)})
        EXPECT_EQ(parse_type_tag(to_string(t)), t) << to_string(t);
    for (const char* bad : {"real", "Vector(0)", "Vector(3", "Matrix(2)", "Function/", "Vector(x)"})
        EXPECT_THROW(parse_type_tag(bad), vrf::TypeError) << bad;
}
