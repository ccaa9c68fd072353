#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnash/tensor.hpp"

using namespace qnash;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I{0.0, 1.0};

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (auto x : xs) v[k++] = x;
  return v;
}

}  // namespace

TEST(PureStateTest, CanonicalPhaseMakesLeadAmplitudeRealPositive) {
  const PureState s = canonicalize_phase(vec({I, 1.0}));
  EXPECT_NEAR(s[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s[0].imag(), 0.0);
  EXPECT_NEAR(std::abs(s[1] - Complex(0.0, -1.0 / std::sqrt(2.0))), 0.0, 1e-15);
}

TEST(PureStateTest, NegligibleLeadAmplitudeIsSkipped) {
  const PureState s = canonicalize_phase(vec({1e-14, -1.0}));
  EXPECT_GT(s[1].real(), 0.0);
  EXPECT_EQ(s[1].imag(), 0.0);
}

TEST(PureStateTest, CanonicalizationIsBitwiseIdempotent) {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const PureState s = haar_random_state(3, rng);
    EXPECT_TRUE(canonicalize_phase(s.amplitudes()) == s);
  }
}

TEST(PureStateTest, GlobalPhaseAndScaleDoNotChangeTheClass) {
  Rng rng(12);
  const PureState s = haar_random_state(4, rng);
  const CVector scaled = 3.5 * std::exp(Complex(0.0, 1.234)) * s.amplitudes();
  EXPECT_TRUE(canonicalize_phase(scaled).projectively_equal(s));
}

TEST(PureStateTest, RejectsZeroEmptyAndNonFinite) {
  EXPECT_THROW(canonicalize_phase(CVector::Zero(2)), InvariantError);
  EXPECT_THROW(canonicalize_phase(CVector(0)), DimensionError);
  EXPECT_THROW(canonicalize_phase(vec({std::nan(""), 1.0})), InvariantError);
}

TEST(PureStateTest, BasisStateBounds) {
  EXPECT_THROW(basis_state(2, 2), DimensionError);
  EXPECT_EQ(basis_state(3, 2)[2], Complex(1.0, 0.0));
}

TEST(InnerProductTest, ConjugateLinearInFirstArgument) {
  const CVector a = vec({I, 0.0});
  const CVector b = vec({1.0, 0.0});
  EXPECT_EQ(inner_product(a, b), Complex(0.0, -1.0));
  EXPECT_EQ(inner_product(b, a), Complex(0.0, 1.0));
  EXPECT_THROW(inner_product(a, CVector::Zero(3)), DimensionError);
}

TEST(TensorProductTest, FirstFactorIsMostSignificant) {
  const CVector joint = tensor_product(ProductPlay({basis_state(2, 0), basis_state(3, 2)}));
  ASSERT_EQ(joint.size(), 6);
  EXPECT_EQ(joint[2], Complex(1.0, 0.0));
  EXPECT_NEAR(joint.norm(), 1.0, 1e-15);
}

TEST(TensorProductTest, SlotEmbeddingReproducesTheProduct) {
  Rng rng(5);
  const std::vector<std::size_t> dims{2, 3, 2};
  for (int trial = 0; trial < 20; ++trial) {
    const ProductPlay play = haar_random_play(dims, rng);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const PureState q = haar_random_state(dims[i], rng);
      const CVector direct = tensor_product(play.with_factor(i, q));
      const CVector viaP = slot_embedding(play, i) * q.amplitudes();
      EXPECT_LT((direct - viaP).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(TensorProductTest, PartialContractionMatchesJointOverlap) {
  Rng rng(6);
  const std::vector<std::size_t> dims{2, 2, 3};
  for (int trial = 0; trial < 20; ++trial) {
    const ProductPlay play = haar_random_play(dims, rng);
    const PureState target = haar_random_state(12, rng);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const CVector v = partial_contraction(target.amplitudes(), play, i);
      const PureState q = haar_random_state(dims[i], rng);
      const Complex joint = inner_product(target.amplitudes(), tensor_product(play.with_factor(i, q)));
      EXPECT_LT(std::abs(joint - inner_product(v, q.amplitudes())), 1e-14);
    }
  }
}

TEST(FubiniStudyTest, KnownValues) {
  EXPECT_NEAR(fubini_study_distance(basis_state(2, 0), basis_state(2, 1)), kPi / 2, 1e-15);
  EXPECT_EQ(fubini_study_distance(basis_state(2, 0), basis_state(2, 0)), 0.0);
  const PureState plus = make_state({1.0, 1.0});
  EXPECT_NEAR(fubini_study_distance(basis_state(2, 0), plus), kPi / 4, 1e-15);
}

TEST(FubiniStudyTest, MetricProperties) {
  Rng rng(7);
  for (int k = 0; k < 300; ++k) {
    const PureState a = haar_random_state(3, rng), b = haar_random_state(3, rng), c = haar_random_state(3, rng);
    const double ab = fubini_study_distance(a, b);
    EXPECT_NEAR(ab, fubini_study_distance(b, a), 1e-14);
    EXPECT_LE(ab, fubini_study_distance(a, c) + fubini_study_distance(c, b) + 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, kPi / 2 + 1e-15);
  }
}

TEST(FubiniStudyTest, InvariantUnderPhase) {
  Rng rng(8);
  const PureState a = haar_random_state(2, rng), b = haar_random_state(2, rng);
  const CVector rotated = std::exp(Complex(0.0, 0.7)) * b.amplitudes();
  EXPECT_NEAR(fubini_study_distance(a.amplitudes(), rotated), fubini_study_distance(a, b), 1e-14);
}

TEST(OperatorTest, UnitarityDiagnostic) {
  CMatrix m = gates::hadamard();
  m(0, 0) += 1e-3;
  try {
    UnitaryOperator::checked(m);
    FAIL() << "non-unitary matrix accepted";
  } catch (const InvariantError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("unitarity", 0), 0u);
  }
  EXPECT_THROW(UnitaryOperator::checked(CMatrix::Identity(2, 3)), DimensionError);
}

TEST(OperatorTest, HermiticityDiagnostic) {
  CMatrix m = gates::pauli_y();
  m(0, 1) += 1e-6;
  EXPECT_THROW(HermitianOperator::checked(m), InvariantError);
  EXPECT_NO_THROW(HermitianOperator::checked(gates::pauli_y()));
}

TEST(OperatorTest, ExponentialOfPauliMatchesClosedForm) {
  // exp(-iθX) = cos θ I − i sin θ X
  for (double theta : {0.0, 0.3, 1.0, kPi / 2, 2.5}) {
    const CMatrix u = matrix_exponential_unitary(HermitianOperator::checked(gates::pauli_x()), theta).matrix();
    const CMatrix expected = std::cos(theta) * CMatrix::Identity(2, 2) - I * std::sin(theta) * gates::pauli_x();
    EXPECT_LT(max_abs_entry(u - expected), 1e-14) << theta;
  }
}

TEST(OperatorTest, ExponentialOfDiagonalIsPhaseDiagonal) {
  CMatrix h = CMatrix::Zero(3, 3);
  h.diagonal() << 1.0, -2.0, 0.5;
  const CMatrix u = matrix_exponential_unitary(HermitianOperator::checked(h), 0.7).matrix();
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(u(k, k) - std::exp(-I * h(k, k) * 0.7)), 1e-14);
}

TEST(EigenTest, DegenerateTopEigenspaceUsesLowestIndexProjection) {
  CMatrix m = CMatrix::Zero(3, 3);
  m.diagonal() << 1.0, 1.0, 0.0;
  const Eigenpair top = extremal_eigenpair(m, true);
  EXPECT_NEAR(top.value, 1.0, 1e-12);
  EXPECT_TRUE(top.vector.projectively_equal(basis_state(3, 0)));
  const Eigenpair bottom = extremal_eigenpair(m, false);
  EXPECT_TRUE(bottom.vector.projectively_equal(basis_state(3, 2)));
}

TEST(EigenTest, TopEigenvectorOfProjector) {
  const PureState psi = make_state({1.0, I, -1.0});
  const CMatrix proj = psi.amplitudes() * psi.amplitudes().adjoint();
  EXPECT_TRUE(extremal_eigenpair(proj, true).vector.projectively_equal(psi, 1e-12));
}

TEST(HaarTest, StatesAndUnitariesAreValidAndSeeded) {
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const UnitaryOperator u = haar_random_unitary(4, rng);
    EXPECT_LT(max_abs_entry(u.matrix().adjoint() * u.matrix() - CMatrix::Identity(4, 4)), 1e-12);
  }
  EXPECT_TRUE(haar_random_state(5, 42) == haar_random_state(5, 42));
  EXPECT_FALSE(haar_random_state(5, 42) == haar_random_state(5, 43));
}

TEST(HaarTest, QubitBlochZIsUniform) {
  // For Haar qubits |α_0|² is uniform on [0,1]: mean 1/2, variance 1/12.
  Rng rng(10);
  const int n = 20000;
  double sum = 0, sq = 0;
  for (int k = 0; k < n; ++k) {
    const double p = std::norm(haar_random_state(2, rng)[0]);
    sum += p;
    sq += p * p;
  }
  const double mean = sum / n, var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.5, 0.01);
  EXPECT_NEAR(var, 1.0 / 12.0, 0.005);
}

TEST(GatesTest, BellPreparationMapsZeroZeroToPhiPlus) {
  const CVector out = gates::bell_preparation().matrix() * tensor_product(ProductPlay({basis_state(2, 0), basis_state(2, 0)}));
  EXPECT_NEAR(std::abs(out[0]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(out[3]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(out[1]) + std::abs(out[2]), 0.0, 1e-15);
}

TEST(ProductPlayTest, WithFactorValidates) {
  const ProductPlay p({basis_state(2, 0), basis_state(2, 1)});
  EXPECT_THROW(p.with_factor(2, basis_state(2, 0)), DimensionError);
  EXPECT_THROW(p.with_factor(0, basis_state(3, 0)), DimensionError);
  EXPECT_TRUE(p.with_factor(1, basis_state(2, 1)) == p);
}
