#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lfr/error.hpp"
#include "lfr/image_io.hpp"
#include "lfr/pipeline.hpp"

extern char** environ;

namespace lfr {
namespace {

class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lfr-restore-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

int run_process(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
  if (rc != 0) throw RestoreUnavailable("cannot start '" + args[0] + "': " + std::strerror(rc));

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw RestoreUnavailable("waitpid failed: " + std::string(std::strerror(errno)));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

Image restore_external(const Image& image, const std::string& command, const std::string& model) {
  if (command.empty()) throw RestoreUnavailable("no restoration command configured");
  ScratchDir scratch;
  const auto in_path = scratch.path() / "input.png";
  const auto out_path = scratch.path() / "restored.png";
  save_png(image, in_path, 16);

  const int code = run_process({command, "infer", "--model", model, "--in", in_path.string(), "--out", out_path.string()});
  if (code != 0) throw RestoreUnavailable("'" + command + "' exited with status " + std::to_string(code));

  Image restored;
  try {
    restored = load_png(out_path).image;
  } catch (const IngestError& e) {
    throw RestoreUnavailable(std::string("restoration output unreadable: ") + e.what());
  }
  if (!restored.same_shape(image)) throw RestoreUnavailable("restoration output has a different shape");
  return restored;
}

}  // namespace lfr
