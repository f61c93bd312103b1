#include "jamcraft/validation.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace jamcraft;

TEST(Validation, QuickSuitePasses)
{
    const ValidationReport r = validate_suite(1, Scale::quick);
    EXPECT_TRUE(r.passed());
    for (const PropertyOutcome& p : r.properties) {
        EXPECT_TRUE(p.passed) << p.name << ": " << p.detail;
        EXPECT_GT(p.cases, 0) << p.name;
    }
}

// A closed form with the wrong sign on the noise term must be caught.
TEST(Validation, NoticesBrokenClosedForm)
{
    SolverHooks broken;
    broken.closed_form = [](const EffectiveDecomposition& eff, double p_z, double noise) {
        ClosedFormOutcome out = closed_form_pd(eff, p_z, noise);
        out.q_prime = out.q_prime + eff.d0 * 2.0;
        return out;
    };
    const PropertyOutcome p = check_closed_form_vs_spca(3, 20, broken);
    EXPECT_FALSE(p.passed);
    ASSERT_FALSE(p.counterexample.empty());
    const nlohmann::json doc = nlohmann::json::parse(p.counterexample);
    EXPECT_TRUE(doc.contains("h_r"));

    EXPECT_TRUE(check_closed_form_vs_spca(3, 20).passed);
}
