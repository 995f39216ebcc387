/*
   Copyright 2026 The urnlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(URNLAB_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& body)
{
    const auto dir = fs::temp_directory_path() / "urnlab-test-cli";
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << body;
    return path;
}

} // namespace

TEST_CASE("cli exit codes")
{
    const auto out = (fs::temp_directory_path() / "urnlab-test-cli" / "out").string();
    const auto good = write_config("good.json", R"({"R": [[0.7, 0.3], [0.4, 0.6]], "C0": [0.5, 0.5]})");
    const auto periodic = write_config("periodic.json", R"({"R": [[0, 1], [1, 0]], "C0": [0.5, 0.5]})");
    const auto broken = write_config("broken.json", R"({"R": [[0.7, 0.3], [0.4, 0.6]], "C0": [0.5]})");

    CHECK(run_cli("classify --config " + good.string() + " --out " + out) == 0);
    CHECK(run_cli("predict --config " + good.string() + " --out " + out) == 0);
    CHECK(run_cli("oracle-check --config " + good.string() + " --out " + out) == 0);
    CHECK(run_cli("verify --config " + good.string() + " --out " + out + " --horizon 2000 --ensemble 300") == 0);
    CHECK(run_cli("verify --config " + good.string() + " --out " + out +
                  " --horizon 5000 --ensemble 1000 --variance-scale 4") == 1);
    CHECK(run_cli("all --config " + periodic.string() + " --out " + out) == 2);
    CHECK(run_cli("classify --config " + broken.string() + " --out " + out) == 3);
    CHECK(run_cli("verify --config " + good.string() + " --out " + out + " --horizon 1000000000 --ensemble 1000000") ==
          3);
    CHECK(run_cli("verify --config " + good.string() + " --cap 1e3") == 3);
    CHECK(run_cli("classify") == 3);
    CHECK(run_cli("explode --config " + good.string()) == 3);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli runs the committed example configs")
{
    const auto out = (fs::temp_directory_path() / "urnlab-test-cli" / "examples").string();
    for (const char* name : {"two_color_irreducible.json", "three_color_one_dominant.json", "four_color_jordan.json"}) {
        CAPTURE(name);
        const std::string config = std::string(URNLAB_CONFIG_DIR) + "/" + name;
        CHECK(run_cli("oracle-check --config " + config + " --out " + out) == 0);
    }
}
