#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <iostream>
#include <vector>

#include "ioncavity/acceptance.hpp"

using namespace ioncavity::checks;

TEST_CASE("every published acceptance criterion passes") {
    const std::filesystem::path work =
        std::filesystem::current_path() / "acceptance_work";
    std::filesystem::remove_all(work);

    const std::vector<CriterionResult> results =
        run_full_acceptance(work.string());
    print_results(std::cout, results);

    REQUIRE(results.size() == 8);
    for (const CriterionResult& result : results) {
        INFO("criterion ", result.id, " (", result.name, "): ", result.details);
        CHECK(result.passed);
    }
    CHECK(all_passed(results));
}
