#include <cmath>

#include <gtest/gtest.h>

#include "hypo/diff_operator.hpp"
#include "hypo/models.hpp"
#include "hypo/symbolic.hpp"
#include "support.hpp"

using namespace hypo;

namespace {

// Variables (p, q).
MultiPoly P() { return MultiPoly::variable(2, 0); }
MultiPoly Q() { return MultiPoly::variable(2, 1); }

PolyVectorField field(MultiPoly dp, MultiPoly dq) { return PolyVectorField(MultiPoly(2), {std::move(dp), std::move(dq)}); }

PolyVectorField rotation() { return field(Q(), -P()); }

}  // namespace

TEST(MultiPoly, ArithmeticAndEvaluation) {
  const MultiPoly f = P() * P() + Rational(3) * Q() - MultiPoly::constant(2, 1);
  const double x[] = {2.0, -1.0};
  EXPECT_DOUBLE_EQ(f.evaluate(x), 4.0 - 3.0 - 1.0);
  EXPECT_EQ(f.degree(), 2);
  EXPECT_EQ(f.derivative(0), Rational(2) * P());
  EXPECT_TRUE((f - f).is_zero());
}

TEST(MultiPoly, ToRationalIsExact) {
  EXPECT_EQ(to_rational(0.5), Rational(1, 2));
  EXPECT_EQ(to_rational(-3.0), Rational(-3));
  EXPECT_THROW(to_rational(std::nan("")), DomainError);
}

TEST(LieBracket, SelfBracketVanishes) {
  prop::Gen g(11);
  const auto x = g.field(2, 3);
  EXPECT_TRUE(lie_bracket(x, x).is_zero());
}

TEST(LieBracket, DerivativeWithRotation) {
  const auto b = lie_bracket(coordinate_field(2, 0), rotation());
  EXPECT_EQ(b, field(MultiPoly(2), -MultiPoly::constant(2, 1)));
}

TEST(LieBracket, DerivativeWithCubicVanishes) {
  EXPECT_TRUE(lie_bracket(coordinate_field(2, 0), field(Q() * Q() * Q(), MultiPoly(2))).is_zero());
}

TEST(LieBracket, VariableCountMismatch) {
  EXPECT_THROW(lie_bracket(coordinate_field(2, 0), coordinate_field(3, 0)), DomainError);
}

TEST(LieBracket, JacobiIdentity) {
  prop::Gen g(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = g.field(3, 3), y = g.field(3, 3), z = g.field(3, 3);
    const auto sum = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) +
                     lie_bracket(z, lie_bracket(x, y));
    EXPECT_TRUE(sum.is_zero());
  }
}

TEST(LieBracket, BilinearAndAntisymmetric) {
  prop::Gen g(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = g.field(2, 3), y = g.field(2, 3), z = g.field(2, 3);
    const Rational a(g.integer(-4, 4), g.integer(1, 3));
    EXPECT_EQ(lie_bracket(a * x + y, z), a * lie_bracket(x, z) + lie_bracket(y, z));
    EXPECT_TRUE((lie_bracket(x, y) + lie_bracket(y, x)).is_zero());
  }
}

TEST(LieBracket, DegreeBound) {
  prop::Gen g(14);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = g.field(2, 3), y = g.field(2, 3);
    EXPECT_LE(growth_degree(lie_bracket(x, y)), growth_degree(x) + growth_degree(y));
  }
}

TEST(LieBracket, AgreesWithOperatorCommutator) {
  // As differential operators, [X, Y] = X o Y - Y o X.
  prop::Gen g(15);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = g.field(2, 2), y = g.field(2, 2);
    const DiffOperator dx = DiffOperator::from_field(x), dy = DiffOperator::from_field(y);
    const DiffOperator comm = compose(dx, dy) + Rational(-1) * compose(dy, dx);
    EXPECT_EQ(comm, DiffOperator::from_field(lie_bracket(x, y)));
  }
}

TEST(GrowthDegree, Examples) {
  EXPECT_EQ(growth_degree(MultiPoly::constant(2, 1)), 0);
  EXPECT_EQ(growth_degree(field(Q() * Q() * Q(), MultiPoly(2))), 3);
  OscParams p;
  p.eps = 0.1;
  EXPECT_EQ(growth_degree(oscillator_spec(p).drift), 3);
}

TEST(BracketClosure, OscillatorUnderB1) {
  const double alpha = 1.5;
  OscParams p;
  p.alpha = alpha;
  p.eps = 0.2;
  const auto spec = oscillator_spec(p);
  const auto family = bracket_closure(spec.drift, spec.diffusion, 2, false);
  ASSERT_GE(family.entries.size(), 2u);
  EXPECT_EQ(family.entries[0].provenance, "X1");
  EXPECT_EQ(family.entries[1].provenance, "[X1,X0]");
  EXPECT_EQ(family.entries[1].field, field(MultiPoly(2), -MultiPoly::constant(2, to_rational(alpha))));
}

TEST(BracketClosure, CoordinateFieldsAreClosed) {
  std::vector<PolyVectorField> xs;
  for (int i = 0; i < 3; ++i) xs.push_back(coordinate_field(3, i));
  const auto family = bracket_closure(PolyVectorField(3), xs, 1, false);
  ASSERT_EQ(family.entries.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(family.entries[i].field, xs[i]);
}

TEST(BracketClosure, EmptyWithoutGenerators) {
  EXPECT_TRUE(bracket_closure(rotation(), {}, 1, false).entries.empty());
  EXPECT_THROW(bracket_closure(rotation(), {}, 0, false), DomainError);
}

TEST(BracketClosure, IncludeX0AddsDrift) {
  const auto family = bracket_closure(rotation(), {coordinate_field(2, 0)}, 1, true);
  ASSERT_EQ(family.entries.size(), 2u);
  EXPECT_EQ(family.entries[1].provenance, "X0");
}

TEST(BracketClosure, ProvenanceRoundTrip) {
  prop::Gen g(16);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x0 = g.field(2, 2);
    const std::vector<PolyVectorField> xs{g.field(2, 1), g.field(2, 2)};
    for (const auto& e : bracket_closure(x0, xs, 3, true).entries)
      EXPECT_EQ(evaluate_provenance(e.provenance, x0, xs), e.field) << e.provenance;
  }
  EXPECT_THROW(evaluate_provenance("[X1,", rotation(), {rotation()}), DomainError);
  EXPECT_THROW(evaluate_provenance("X7", rotation(), {rotation()}), DomainError);
}

TEST(Nondegeneracy, OrthonormalFrame) {
  BracketFamily f;
  f.entries = {{coordinate_field(2, 0), "X1", 1}, {coordinate_field(2, 1, -1), "[X1,X0]", 2}};
  const auto r = nondegeneracy_margin(f, sample_grid(2, 3.0, 5), 0);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.margin, 1.0, 1e-12);
  ASSERT_TRUE(r.constant.has_value());
  EXPECT_NEAR(*r.constant, 1.0, 1e-12);
}

TEST(Nondegeneracy, RankDeficientFails) {
  BracketFamily f;
  f.entries = {{coordinate_field(2, 0), "X1", 1}};
  const auto r = nondegeneracy_margin(f, sample_grid(2, 1.0, 3), 0);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.margin, 0.0);
}

TEST(Nondegeneracy, VanishingCoefficientFailsAtOrigin) {
  BracketFamily f;
  f.entries = {{coordinate_field(2, 0), "X1", 1}, {field(MultiPoly(2), Q()), "X2", 1}};
  const std::vector<std::vector<double>> samples{{1.0, 1.0}, {0.0, 0.0}};
  const auto r = nondegeneracy_margin(f, samples, 0);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.worst_sample, 1u);
}

TEST(Nondegeneracy, MissingDiffusionFails) {
  // Only the drift, without X1, cannot span at the origin.
  const auto family = bracket_closure(rotation(), {}, 3, true);
  const auto r = nondegeneracy_margin(family, sample_grid(2, 2.0, 5), 0);
  EXPECT_FALSE(r.pass);
}

TEST(DiffOperator, TransposeOfDerivativeIsNegated) {
  const DiffOperator d = DiffOperator::from_field(coordinate_field(2, 0));
  EXPECT_EQ(transpose(d), Rational(-1) * d);
  const DiffOperator m = DiffOperator::multiplication(P() * Q());
  EXPECT_EQ(transpose(m), m);
}

TEST(DiffOperator, ApplyFollowsLeibniz) {
  const DiffOperator d = DiffOperator::from_field(coordinate_field(2, 0));
  const DiffOperator m = DiffOperator::multiplication(P());
  const MultiPoly f = P() * P() * Q();
  EXPECT_EQ(compose(d, m).apply(f), d.apply(m.apply(f)));
}
