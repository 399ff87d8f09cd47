#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "steaneft/pauli.hpp"
#include "steaneft/rng.hpp"

using namespace steaneft;

TEST_CASE("pauli codes split into x and z components") {
  CHECK(pauli_from_bits(false, false) == PauliOp::I);
  CHECK(pauli_from_bits(true, false) == PauliOp::X);
  CHECK(pauli_from_bits(false, true) == PauliOp::Z);
  CHECK(pauli_from_bits(true, true) == PauliOp::Y);
  CHECK(pauli_has_x(PauliOp::Y));
  CHECK(pauli_has_z(PauliOp::Y));
  CHECK_FALSE(pauli_has_z(PauliOp::X));
}

TEST_CASE("frames compose as xor and report weight") {
  PauliFrame a(5), b(5);
  a.apply_pauli(0, PauliOp::X);
  a.apply_pauli(3, PauliOp::Y);
  b.apply_pauli(3, PauliOp::Y);
  b.apply_pauli(4, PauliOp::Z);
  a.compose(b);
  CHECK(a.pauli_at(0) == PauliOp::X);
  CHECK(a.pauli_at(3) == PauliOp::I);
  CHECK(a.pauli_at(4) == PauliOp::Z);
  CHECK(a.weight() == 2);
  CHECK(a.to_string() == "XIIIZ");
}

TEST_CASE("frame rejects out-of-range sizes") {
  CHECK_THROWS_AS(PauliFrame(65), ContractViolation);
}

TEST_CASE("streams are pure functions of their key") {
  RandomStream a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool all_equal = true;
  RandomStream a2(123);
  for (int i = 0; i < 100; ++i) all_equal = all_equal && (a2.next_u64() == c.next_u64());
  CHECK_FALSE(all_equal);
}

TEST_CASE("derived keys differ by purpose and parent") {
  CHECK(derive_key(1, 2) != derive_key(1, 3));
  CHECK(derive_key(1, 2) != derive_key(2, 2));
  CHECK(derive_key(0, 0) == derive_key(0, 0));
}

TEST_CASE("next_below stays in range and covers small supports") {
  RandomStream rs(7);
  std::array<int, 5> seen{};
  for (int i = 0; i < 2000; ++i) {
    uint32_t v = rs.next_below(5);
    REQUIRE(v < 5);
    ++seen[v];
  }
  for (int count : seen) CHECK(count > 300);
}

TEST_CASE("next_unit stays in the half-open unit interval") {
  RandomStream rs(11);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    double u = rs.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("binomial samplers match their distributions on moments") {
  RandomStream rs(42);
  const int n = 20;
  const double p = 0.07;
  const double q0 = std::pow(1 - p, n);
  double mean = 0;
  const int trials = 40000;
  for (int i = 0; i < trials; ++i) mean += sample_binomial(rs, n, p, q0);
  mean /= trials;
  CHECK(std::abs(mean - n * p) < 0.03);

  double mean1 = 0;
  for (int i = 0; i < trials; ++i) {
    int k = sample_binomial_at_least_one(rs, n, p, q0);
    REQUIRE(k >= 1);
    mean1 += k;
  }
  mean1 /= trials;
  CHECK(std::abs(mean1 - n * p / (1 - q0)) < 0.03);
}
