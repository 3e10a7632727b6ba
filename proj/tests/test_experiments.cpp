#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gibbslab/experiments.hpp"

using namespace gibbslab;

TEST_CASE("centered boxes and symmetry validation") {
    auto box = centered_box({2, 2, 6});
    CHECK(box.lo(2) == -3);
    CHECK(box.hi(2) == 2);
    CHECK(box.interior_count() == 24);
    require_symmetric_interface_box(box);
    auto odd = Box::make(3, {{0, 1}, {0, 1}, {-2, 2}});
    CHECK_THROWS_AS(require_symmetric_interface_box(odd),
                    std::invalid_argument);
}

TEST_CASE("alpha mixture condition arithmetic") {
    CHECK(alpha_mixture_ratio(0.5, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(alpha_mixture_condition(0.5, 1.0, 1.0));
    // alpha = 1 collapses the second term
    CHECK(alpha_mixture_ratio(1.0, 0.9, 0.95) ==
          doctest::Approx(0.9 / 0.975).epsilon(1e-12));
    CHECK(alpha_mixture_condition(1.0, 0.9, 0.95));
    CHECK(alpha_mixture_ratio(1.0, 0.4, 0.95) ==
          doctest::Approx(0.4 / 0.975).epsilon(1e-12));
    CHECK_FALSE(alpha_mixture_condition(1.0, 0.2, 0.95));
    CHECK_THROWS_AS(alpha_mixture_ratio(0.0, 0.5, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(alpha_mixture_ratio(0.5, 0.7, 0.6), std::invalid_argument);
}

TEST_CASE("exact ising mixture witness on a small column") {
    auto box = centered_box({1, 1, 4});
    SUBCASE("beta = 0 has no witness and conditional exactly 1/2") {
        auto rep = mixture_conditional_witness(box, ModelParams(2, 0.0), 0);
        CHECK(rep.method == "exact");
        CHECK_FALSE(rep.witness);
        CHECK(rep.conditional == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(rep.marginal - 0.5) <= 1e-12);
    }
    SUBCASE("large beta produces the witness with the chain verified") {
        auto rep = mixture_conditional_witness(box, ModelParams(2, 2.5), 1);
        CHECK(rep.method == "exact");
        CHECK(rep.witness);
        CHECK(rep.conditional > 0.5);
        CHECK(std::abs(rep.marginal - 0.5) <= 1e-12);
        CHECK(rep.details.at("chain").at("step1").get<bool>());
        CHECK(rep.details.at("chain").at("step2").get<bool>());
        CHECK(rep.details.at("chain").at("step3").get<bool>());
        CHECK(rep.details.at("chain").at("antisymmetry").get<bool>());
        CHECK(rep.conditional >= rep.floor_bound - 1e-12);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(
            mixture_conditional_witness(box, ModelParams(3, 1.0), 0),
            std::invalid_argument);
        CHECK_THROWS_AS(
            mixture_conditional_witness(box, ModelParams(2, 1.0), -1),
            std::invalid_argument);
        auto asym = Box::make(3, {{0, 0}, {0, 0}, {-1, 1}});
        CHECK_THROWS_AS(
            mixture_conditional_witness(asym, ModelParams(2, 1.0), 0),
            std::invalid_argument);
    }
}

TEST_CASE("majority witness") {
    auto box = centered_box({2, 2, 4});
    SUBCASE("m = 1 reduces to the site witness") {
        auto maj = majority_witness(box, ModelParams(2, 1.8), 0, 1);
        auto site = mixture_conditional_witness(box, ModelParams(2, 1.8), 0);
        CHECK(maj.conditional ==
              doctest::Approx(site.conditional).epsilon(1e-12));
        CHECK(maj.marginal == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("beta = 0 gives conditional 1/2") {
        auto rep = majority_witness(box, ModelParams(2, 0.0), 0, 1);
        CHECK(rep.conditional == doctest::Approx(0.5).epsilon(1e-12));
        CHECK_FALSE(rep.witness);
    }
    SUBCASE("even m rejected; block must fit the half-space") {
        CHECK_THROWS_AS(majority_witness(box, ModelParams(2, 1.0), 0, 2),
                        std::invalid_argument);
        CHECK_THROWS_AS(majority_witness(box, ModelParams(2, 1.0), 0, 3),
                        std::invalid_argument);
    }
}

TEST_CASE("potts witness exact on a small column") {
    auto box = centered_box({1, 2, 4});
    ModelParams params(3, 2.2);
    auto rep = potts_dobrushin_witness(box, params, 0);
    CHECK(rep.method == "exact");
    CHECK(rep.ceiling == doctest::Approx(rep.marginal));
    CHECK(rep.details.at("component_ceiling").at("p12_holds").get<bool>());
    CHECK(rep.details.at("component_ceiling").at("p21_holds").get<bool>());
    SUBCASE("beta = 0: conditional equals marginal, no witness") {
        auto rep0 = potts_dobrushin_witness(box, ModelParams(3, 0.0), 0);
        CHECK(rep0.conditional == doctest::Approx(rep0.marginal).epsilon(1e-12));
        CHECK_FALSE(rep0.witness);
    }
    SUBCASE("q = 2 rejected") {
        CHECK_THROWS_AS(potts_dobrushin_witness(box, ModelParams(2, 1.0), 0),
                        std::invalid_argument);
    }
}

TEST_CASE("potts witness through the transfer matrix matches enumeration") {
    auto box = centered_box({2, 2, 4});  // 16 sites, q = 3: both paths run
    ModelParams params(3, 1.8);
    WitnessOptions exact_opts;
    auto exact_rep = potts_dobrushin_witness(box, params, 0, 1, exact_opts);
    REQUIRE(exact_rep.method == "exact");
    WitnessOptions tm_opts;
    tm_opts.limits.max_states = 1 << 10;  // force past enumeration
    auto tm_rep = potts_dobrushin_witness(box, params, 0, 1, tm_opts);
    REQUIRE(tm_rep.method == "transfer");
    CHECK(tm_rep.conditional ==
          doctest::Approx(exact_rep.conditional).epsilon(1e-9));
    CHECK(tm_rep.marginal == doctest::Approx(exact_rep.marginal).epsilon(1e-9));
    CHECK(tm_rep.witness == exact_rep.witness);
}

TEST_CASE("mc witness path agrees with exact on a tiny box") {
    auto box = centered_box({1, 1, 2});
    ModelParams params(2, 1.0);
    auto exact_rep = mixture_conditional_witness(box, params, 0);
    WitnessOptions opts;
    opts.force_mc = true;
    opts.mc.n_sweeps = 40000;
    opts.mc.n_chains = 4;
    auto mc_rep = mixture_conditional_witness(box, params, 0, 3, opts);
    CHECK(mc_rep.method == "mc");
    CHECK(std::abs(mc_rep.conditional - exact_rep.conditional) <=
          std::max(4.0 * mc_rep.stderr_cond, 0.02));
    CHECK(std::abs(mc_rep.marginal - 0.5) <=
          std::max(4.0 * mc_rep.stderr_marg, 0.02));
}

TEST_CASE("mstar estimate behaves at the temperature extremes") {
    auto hot = estimate_mstar(2, 0.0, 5, 4000, 17);
    CHECK(std::abs(hot.mean) <= std::max(4.0 * hot.stderr_of_mean, 0.05));
    auto cold = estimate_mstar(2, 4.0, 5, 4000, 18);
    CHECK(cold.mean > 0.95);
}

TEST_CASE("deep in the ordered phase the 2d magnetization sits below 3d") {
    auto m2 = estimate_mstar(2, 1.4, 6, 20000, 51);
    auto m3 = estimate_mstar(3, 1.4, 4, 20000, 52);
    double se = std::hypot(m2.stderr_of_mean, m3.stderr_of_mean);
    CHECK(m2.mean <= m3.mean + 3 * se);
}

TEST_CASE("mc majority witness on a 6x6x8 interface box") {
    auto box = centered_box({6, 6, 8});
    WitnessOptions opts;
    opts.force_mc = true;
    opts.mc.n_sweeps = 12000;
    opts.mc.n_chains = 8;
    opts.mc.burn_in = 2000;
    auto rep = majority_witness(box, ModelParams(2, 1.2), 2, 3, 31, opts);
    CHECK(rep.method == "mc");
    CHECK(rep.witness);
    CHECK(rep.conditional > 0.9);
}

TEST_CASE("interface profile shape on a cold interface") {
    auto box = centered_box({4, 4, 4});
    auto bc = BoundaryCondition::dobrushin(box, 2, 0, 2, 1);
    RunOptions opts;
    opts.n_sweeps = 4000;
    opts.n_chains = 2;
    opts.seed = 5;
    auto res = interface_profile(box, bc, ModelParams(2, 2.5), opts);
    REQUIRE(res.profile.layer.size() == 4);
    // plus phase above the plane, minus below
    CHECK(res.profile.mean.front() < -0.5);
    CHECK(res.profile.mean.back() > 0.5);
    CHECK(res.heights.column.size() == 16);
    for (double v : res.heights.var_h) CHECK(v >= 0.0);
    SUBCASE("csv writer emits rows") {
        std::string path = "/tmp/gibbslab_profile_test.csv";
        write_profile_csv(path, res);
        std::ifstream in(path);
        std::string line;
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows >= 1 + 4 + 32);
    }
}

TEST_CASE("one-step profile splits the two half-spaces") {
    auto box = centered_box({4, 2, 4});
    auto bc = BoundaryCondition::one_step(box);
    RunOptions opts;
    opts.n_sweeps = 3000;
    opts.n_chains = 2;
    opts.seed = 9;
    auto res = interface_profile(box, bc, ModelParams(2, 2.5), opts, true);
    REQUIRE(res.half_profiles.size() == 2);
    // the x >= 0 half has its jump one layer lower: at z = -1 the right
    // half is already plus while the left half is still minus
    const auto& left = res.half_profiles[0];
    const auto& right = res.half_profiles[1];
    auto at_layer = [](const MagnetizationProfile& p, int z) {
        for (std::size_t l = 0; l < p.layer.size(); ++l)
            if (p.layer[l] == z) return p.mean[l];
        throw std::runtime_error("layer missing");
    };
    CHECK(at_layer(right, -1) > 0.0);
    CHECK(at_layer(left, -1) < 0.0);
}

TEST_CASE("localization scan runs and reports") {
    auto table = localization_scan(2, 1.2, {4, 6}, 21, 1500, 2);
    REQUIRE(table.rows.size() == 2);
    for (const auto& r : table.rows) {
        CHECK(r.var_h >= 0.0);
        CHECK(r.stderr_var >= 0.0);
    }
    auto j = table.to_json();
    CHECK(j.at("rows").size() == 2);
    CHECK_THROWS_AS(localization_scan(4, 1.0, {4}, 1, 100),
                    std::invalid_argument);
}
