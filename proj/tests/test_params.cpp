#include <doctest.h>

#include "helpers.hpp"

using namespace floqns;

TEST_SUITE("params") {

TEST_CASE("validate rejects out-of-range parameters") {
  auto bad = [](auto&& tweak) {
    Params p = tst::base_params();
    tweak(p);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  };
  CHECK_NOTHROW(tst::base_params().validate());
  bad([](Params& p) { p.nu = 0.0; });
  bad([](Params& p) { p.nu_tilde = p.nu / 2; });          // nu_tilde < nu
  bad([](Params& p) { p.nu_tilde = 5.0 * p.nu; });        // exceeds (2 + mu*) nu
  bad([](Params& p) { p.gamma = -1.0; });
  bad([](Params& p) { p.S_force = -0.1; });
  bad([](Params& p) { p.dim_n = 4; });
  bad([](Params& p) { p.alpha = {1.0, 1.0}; });           // wrong count for n = 2
  bad([](Params& p) { p.alpha = {-1.0}; });
}

TEST_CASE("nondimensionalization worked example") {
  // mu 2, mu' 1, rho* 1, depth 1, period 5, p'(rho*) 4, force scale 0.1
  Params p = nondimensionalize(2.0, 1.0, 1.0, 1.0, 5.0, 4.0, 0.1);
  CHECK(p.nu == doctest::Approx(10.0));
  CHECK(p.nu_tilde == doctest::Approx(15.0));
  CHECK(p.gamma == doctest::Approx(10.0));
  CHECK(p.S_force == doctest::Approx(2.5));
  CHECK_NOTHROW(p.validate());

  CHECK_THROWS(nondimensionalize(2.0, 5.0, 1.0, 1.0, 5.0, 4.0, 0.1)); // mu'/mu > mu*
  CHECK_THROWS(nondimensionalize(2.0, 1.0, 1.0, 1.0, 5.0, -4.0, 0.1));
}

TEST_CASE("regime report at the working point") {
  Params p = tst::base_params();
  RegimeReport r = check_regime(p);

  // nu^2/(nu+nu~) = 5, gamma^2/(nu+nu~) = 80
  CHECK(r.nu_ratio == doctest::Approx(5.0));
  CHECK(r.gamma_ratio == doctest::Approx(80.0));
  CHECK(r.ok_nu);
  CHECK(r.ok_gamma);

  // frozen threshold value for nu = nu~ = 10, gamma = 40
  CHECK(r.S_threshold == doctest::Approx(1.5576e-4).epsilon(1e-4));
  CHECK(r.S_threshold_simplified == doctest::Approx(0.1 * 100.0 / 64000.0).epsilon(1e-12));
  CHECK(r.S_threshold < r.S_threshold_simplified); // exact form is sharper

  p.S_force = 0.5 * r.S_threshold;
  CHECK(check_regime(p).all());
  p.S_force = 2.0 * r.S_threshold;
  CHECK(!check_regime(p).ok_S);
}

} // TEST_SUITE
