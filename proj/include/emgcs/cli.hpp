#pragma once

namespace emgcs::cli {

// Entry point behind the emgcs binary; returns the process exit status.
int run(int argc, char** argv);

}  // namespace emgcs::cli
