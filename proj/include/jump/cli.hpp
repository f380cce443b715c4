#pragma once

namespace jump {

int run_cli(int argc, char** argv);

}  // namespace jump
