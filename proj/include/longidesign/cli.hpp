#pragma once
// Command-line front end.  Subcommands: power, n, r, mde, optimal, sweep,
// verify, tables, wizard.  Exit codes: 0 success, 1 computation error
// (e.g. unattainable power), 2 input validation error.

namespace longidesign {

int run(int argc, char** argv);

}  // namespace longidesign
