#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "floq/errors.hpp"
#include "floq/lorentz.hpp"
#include "floq/trace.hpp"
#include "floq/units.hpp"

using namespace floq;

namespace {

double peak_shape(double w, double center, double hw, double height) {
  const double u = (w - center) / hw;
  return height / (1.0 + u * u);
}

SpectrumTrace synth_trace(const std::vector<double>& grid, double floor,
                          const std::vector<std::array<double, 3>>& peaks) {
  SpectrumTrace t;
  t.freq = grid;
  t.values.assign(grid.size(), floor);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& p : peaks) t.values[i] += peak_shape(grid[i], p[0], p[1], p[2]);
  t.normalization = Normalization::ShotNoiseNormalized;
  return t;
}

}  // namespace

TEST_SUITE("lorentz") {

TEST_CASE("a single clean peak is recovered to numerical precision") {
  const double c = hz_to_rad(1e6);
  const double hw = hz_to_rad(1e5);
  const double h = 0.5;
  const std::vector<double> grid = linspace(c - 8.0 * hw, c + 8.0 * hw, 801);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{c, hw, h}});

  const auto fits = fit_lorentzians(trace, 1, {c + 0.5 * hw});
  REQUIRE(fits.size() == 1);
  CHECK(fits[0].center == doctest::Approx(c).epsilon(1e-6));
  CHECK(fits[0].hwhm == doctest::Approx(hw).epsilon(1e-6));
  CHECK(fits[0].height == doctest::Approx(h).epsilon(1e-6));
  CHECK(fits[0].area == doctest::Approx(pi * h * hw).epsilon(1e-6));
  CHECK_FALSE(fits[0].overlap_warning);
}

TEST_CASE("two well separated peaks keep their area ratio") {
  const double hw = hz_to_rad(1e5);
  const double c1 = -hz_to_rad(5e6);
  const double c2 = hz_to_rad(5e6);
  const std::vector<double> grid = linspace(-hz_to_rad(8e6), hz_to_rad(8e6), 2001);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{c1, hw, 0.3}, {c2, hw, 0.5}});

  const auto fits = fit_lorentzians(trace, 2, {c1 - 0.3 * hw, c2 + 0.4 * hw});
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].center < fits[1].center);
  CHECK(fits[0].area / fits[1].area == doctest::Approx(0.6).epsilon(1e-6));
  CHECK_FALSE(fits[0].overlap_warning);
  CHECK_FALSE(fits[1].overlap_warning);
}

TEST_CASE("results come back sorted even when seeds are reversed") {
  const double hw = hz_to_rad(2e5);
  const double c1 = -hz_to_rad(3e6);
  const double c2 = hz_to_rad(4e6);
  const std::vector<double> grid = linspace(-hz_to_rad(7e6), hz_to_rad(8e6), 1501);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{c1, hw, 0.4}, {c2, hw, 0.2}});

  const auto fits = fit_lorentzians(trace, 2, {c2 + 0.2 * hw, c1 - 0.2 * hw});
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].center == doctest::Approx(c1).epsilon(1e-6));
  CHECK(fits[1].center == doctest::Approx(c2).epsilon(1e-6));
}

TEST_CASE("a flat trace raises a fit error") {
  SpectrumTrace flat;
  flat.freq = linspace(-1e6, 1e6, 101);
  flat.values.assign(101, 1.0);
  flat.normalization = Normalization::ShotNoiseNormalized;
  CHECK_THROWS_AS(fit_lorentzians(flat, 1, {0.0}), fit_error);
}

TEST_CASE("close peaks are flagged as overlapping") {
  const double hw = hz_to_rad(4e5);
  const double c1 = 0.0;
  const double c2 = 3.0 * hw;
  const std::vector<double> grid = linspace(-12.0 * hw, 15.0 * hw, 2001);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{c1, hw, 0.5}, {c2, hw, 0.5}});

  const auto fits = fit_lorentzians(trace, 2, {c1, c2});
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].overlap_warning);
  CHECK(fits[1].overlap_warning);
}

TEST_CASE("declared noise makes covariances absolute") {
  const double c = 0.0;
  const double hw = hz_to_rad(1e5);
  const std::vector<double> grid = linspace(-6.0 * hw, 6.0 * hw, 601);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{c, hw, 0.5}});

  const auto rel = fit_lorentzians(trace, 1, {c});
  const auto abs = fit_lorentzians(trace, 1, {c}, 0.01);
  REQUIRE(rel.size() == 1);
  REQUIRE(abs.size() == 1);
  CHECK(abs[0].covariance(2, 2) > 0.0);
  CHECK(abs[0].covariance(2, 2) > 100.0 * rel[0].covariance(2, 2));
  CHECK(std::sqrt(abs[0].covariance(2, 2)) < 0.1);
}

TEST_CASE("the area covariance row is propagated from the fitted shape") {
  const double c = 0.0;
  const double hw = hz_to_rad(2e5);
  const std::vector<double> grid = linspace(-6.0 * hw, 6.0 * hw, 801);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{c, hw, 0.4}});

  const auto fits = fit_lorentzians(trace, 1, {c}, 0.02);
  REQUIRE(fits.size() == 1);
  const auto& f = fits[0];
  const double expected = pi * pi *
      (f.height * f.height * f.covariance(1, 1) +
       f.hwhm * f.hwhm * f.covariance(2, 2) +
       2.0 * f.height * f.hwhm * f.covariance(1, 2));
  CHECK(f.covariance(3, 3) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("seed count must match the requested peak count") {
  const double hw = hz_to_rad(1e5);
  const std::vector<double> grid = linspace(-6.0 * hw, 6.0 * hw, 301);
  const SpectrumTrace trace = synth_trace(grid, 1.0, {{0.0, hw, 0.5}});
  CHECK_THROWS_AS(fit_lorentzians(trace, 2, {0.0}), error);
}

}  // TEST_SUITE
