#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ioncavity::checks {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string details;
    double seconds = 0.0;
};

// Runs the seven physics and statistics criteria of the acceptance suite,
// writing their data artifacts under out_dir (created if absent). All
// artifacts are deterministic: repeating a run reproduces them byte for
// byte.
std::vector<CriterionResult> run_reproduction(const std::string& out_dir);

// Full suite: run_reproduction into work_dir/run_a and work_dir/run_b,
// then a byte-identity comparison of the two artifact trees as the final
// determinism criterion.
std::vector<CriterionResult> run_full_acceptance(const std::string& work_dir);

// One line per criterion plus a summary row.
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace ioncavity::checks
