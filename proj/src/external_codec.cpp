#include "medroi/external_codec.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "medroi/byte_io.hpp"
#include "medroi/error.hpp"

extern char** environ;

namespace medroi::codec::external {

namespace {

class ProcessSlots {
 public:
  ProcessSlots()
      : max_(std::max(1, static_cast<int>(std::thread::hardware_concurrency()))) {}

  void set_max(int n) {
    std::lock_guard lock(mu_);
    max_ = std::max(1, n);
    cv_.notify_all();
  }
  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return running_ < max_; });
    ++running_;
  }
  void release() {
    std::lock_guard lock(mu_);
    --running_;
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int max_;
  int running_ = 0;
};

ProcessSlots& slots() {
  static ProcessSlots s;
  return s;
}

struct SlotGuard {
  SlotGuard() { slots().acquire(); }
  ~SlotGuard() { slots().release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;
};

struct Fd {
  int fd = -1;
  Fd() = default;
  explicit Fd(int f) : fd(f) {}
  Fd(Fd&& o) noexcept : fd(std::exchange(o.fd, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd = std::exchange(o.fd, -1);
    return *this;
  }
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

void make_pipe(Fd& read_end, Fd& write_end) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::ExternalCodecError, "pipe failed");
  }
  read_end = Fd(fds[0]);
  write_end = Fd(fds[1]);
}

std::string first_word(const std::string& command) {
  std::istringstream in(command);
  std::string word;
  while (in >> word) {
    // Skip leading VAR=value assignments.
    if (word.find('=') == std::string::npos || word.front() == '=') return word;
  }
  return {};
}

bool executable_exists(const std::string& program) {
  if (program.empty()) return false;
  if (program.find('/') != std::string::npos) {
    return ::access(program.c_str(), X_OK) == 0;
  }
  const char* path = std::getenv("PATH");
  std::istringstream dirs(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) dir = ".";
    const std::string candidate = dir + "/" + program;
    struct stat st{};
    if (::stat(candidate.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
        ::access(candidate.c_str(), X_OK) == 0) {
      return true;
    }
  }
  return false;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

struct TempFile {
  std::string path;
  TempFile() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "medroi-XXXXXX").string();
    const int fd = ::mkstemp(tmpl.data());
    if (fd < 0) throw Error(ErrorCode::ExternalCodecError, "mkstemp failed");
    ::close(fd);
    path = tmpl;
  }
  ~TempFile() { ::unlink(path.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
};

}  // namespace

void set_max_concurrent_processes(int n) { slots().set_max(n); }

std::vector<std::uint8_t> make_frame(std::span<const float> samples, int width,
                                     int height, Dtype dtype) {
  if (dtype == Dtype::F32) {
    throw Error(ErrorCode::EncodeError,
                "external codecs take 8- or 16-bit integer samples");
  }
  if (width < 1 || height < 1 || width > 0xFFFF || height > 0xFFFF) {
    throw Error(ErrorCode::EncodeError, "frame dimensions do not fit u16");
  }
  ByteWriter w;
  w.text(kFrameMagic);
  w.u16(static_cast<std::uint16_t>(width));
  w.u16(static_cast<std::uint16_t>(height));
  w.u8(static_cast<std::uint8_t>(bits_per_sample(dtype)));
  w.bytes(pack_samples(samples, dtype));
  return w.take();
}

Frame parse_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeader ||
      !std::equal(kFrameMagic.begin(), kFrameMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::DecodeError, "missing MRF1 frame header");
  }
  ByteReader r(bytes.subspan(4));
  std::uint16_t w = 0;
  std::uint16_t h = 0;
  std::uint8_t depth = 0;
  r.u16(w);
  r.u16(h);
  r.u8(depth);
  if (depth != 8 && depth != 16) {
    throw Error(ErrorCode::DecodeError, "MRF1 bit depth must be 8 or 16");
  }
  const std::size_t need = static_cast<std::size_t>(w) * h * (depth / 8);
  if (bytes.size() - kFrameHeader != need) {
    throw Error(ErrorCode::DecodeError, "MRF1 sample section has wrong length");
  }
  Frame f;
  f.width = w;
  f.height = h;
  f.bit_depth = depth;
  f.samples.assign(bytes.begin() + kFrameHeader, bytes.end());
  return f;
}

ProcessResult run_filter(const std::string& command,
                         std::span<const std::uint8_t> input,
                         std::chrono::milliseconds timeout) {
  static std::once_flag sigpipe_once;
  // A child that exits early must not take the whole process down through
  // SIGPIPE on our next write.
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

  const std::string program = first_word(command);
  if (!executable_exists(program)) {
    throw Error(ErrorCode::ExternalCodecError,
                "'" + program + "' not found");
  }

  SlotGuard slot;
  Fd in_r, in_w, out_r, out_w, err_r, err_w;
  make_pipe(in_r, in_w);
  make_pipe(out_r, out_w);
  make_pipe(err_r, err_w);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_r.fd, STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_w.fd, STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_w.fd, STDERR_FILENO);

  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::ExternalCodecError,
                std::string("spawn failed: ") + std::strerror(rc));
  }
  in_r.reset();
  out_w.reset();
  err_w.reset();
  for (int fd : {in_w.fd, out_r.fd, err_r.fd}) {
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  }

  ProcessResult result;
  std::size_t written = 0;
  if (input.empty()) in_w.reset();
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::array<std::uint8_t, 1 << 16> chunk{};
  bool timed_out = false;

  while (out_r.fd >= 0 || err_r.fd >= 0) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    std::array<pollfd, 3> pfds{};
    nfds_t n = 0;
    auto add = [&](int fd, short events) {
      if (fd >= 0) pfds[n++] = pollfd{fd, events, 0};
    };
    add(in_w.fd, POLLOUT);
    add(out_r.fd, POLLIN);
    add(err_r.fd, POLLIN);
    const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - now).count();
    const int ready = ::poll(pfds.data(), n, static_cast<int>(
                                                 std::min<long long>(wait_ms, 1000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (nfds_t i = 0; i < n; ++i) {
      const auto& p = pfds[i];
      if (p.revents == 0) continue;
      if (p.fd == in_w.fd) {
        const ssize_t k = ::write(in_w.fd, input.data() + written,
                                  input.size() - written);
        if (k > 0) written += static_cast<std::size_t>(k);
        if ((k < 0 && errno != EAGAIN) || written == input.size()) in_w.reset();
        continue;
      }
      const ssize_t k = ::read(p.fd, chunk.data(), chunk.size());
      if (k > 0) {
        if (p.fd == out_r.fd) {
          result.out.insert(result.out.end(), chunk.begin(), chunk.begin() + k);
        } else {
          result.err.append(reinterpret_cast<const char*>(chunk.data()),
                            static_cast<std::size_t>(k));
        }
      } else if (k == 0 || errno != EAGAIN) {
        if (p.fd == out_r.fd) out_r.reset(); else err_r.reset();
      }
    }
  }

  in_w.reset();
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw Error(ErrorCode::ExternalCodecError,
                "'" + program + "' timed out after " +
                    std::to_string(timeout.count()) + " ms");
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

ExternalCodec::ExternalCodec(std::string id, ExternalCommand command)
    : id_(std::move(id)), command_(std::move(command)) {}

std::vector<std::uint8_t> ExternalCodec::run(
    const std::string& command_template, std::span<const std::uint8_t> input,
    int quality) const {
  if (command_template.empty()) {
    throw Error(ErrorCode::ExternalCodecError,
                id_ + ": no command configured for this direction");
  }
  std::string cmd = command_template;
  replace_all(cmd, "{quality}", std::to_string(quality));

  ProcessResult res;
  if (command_.use_temp_files) {
    TempFile in_file;
    TempFile out_file;
    write_file(in_file.path, input);
    replace_all(cmd, "{in}", in_file.path);
    replace_all(cmd, "{out}", out_file.path);
    res = run_filter(cmd, {}, command_.timeout);
    if (res.exit_code == 0) res.out = read_file(out_file.path);
  } else {
    res = run_filter(cmd, input, command_.timeout);
  }
  if (res.exit_code != 0) {
    throw Error(ErrorCode::ExternalCodecError,
                id_ + " exited with status " + std::to_string(res.exit_code) +
                    ": " + res.err);
  }
  return std::move(res.out);
}

std::vector<std::uint8_t> ExternalCodec::encode(std::span<const float> samples,
                                                Dims dims, Dtype dtype,
                                                int quality) const {
  if (dims.d != 1) {
    throw Error(ErrorCode::UnsupportedMode, id_ + " encodes 2D slices only");
  }
  return run(command_.encode, make_frame(samples, dims.w, dims.h, dtype),
             quality);
}

std::vector<float> ExternalCodec::decode(std::span<const std::uint8_t> bytes,
                                         Dims dims, Dtype dtype,
                                         int quality) const {
  const Frame f = parse_frame(run(command_.decode, bytes, quality));
  if (f.width != dims.w || f.height != dims.h ||
      f.bit_depth != bits_per_sample(dtype)) {
    throw Error(ErrorCode::DecodeError,
                id_ + ": decoder returned a frame of the wrong shape");
  }
  return unpack_samples(f.samples, dtype);
}

std::string environment_key(std::string_view codec_id) {
  std::string key = "MEDROI_CODEC_";
  for (char c : codec_id) {
    key += std::isalnum(static_cast<unsigned char>(c))
               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
               : '_';
  }
  return key;
}

std::vector<std::shared_ptr<const Codec>> codecs_from_environment() {
  constexpr std::string_view kPrefix = "MEDROI_CODEC_";
  constexpr std::array<std::string_view, 3> kAttributes = {
      "_DECODE", "_TIMEOUT_MS", "_TEMPFILES"};
  std::vector<std::shared_ptr<const Codec>> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos || !entry.starts_with(kPrefix)) continue;
    const std::string_view name = entry.substr(kPrefix.size(), eq - kPrefix.size());
    if (name.empty() ||
        std::any_of(kAttributes.begin(), kAttributes.end(),
                    [&](std::string_view a) { return name.ends_with(a); })) {
      continue;
    }
    std::string id;
    for (char c : name) {
      id += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (id.size() > kMaxIdLength) continue;

    const std::string key(entry.substr(0, eq));
    ExternalCommand cmd;
    cmd.encode = std::string(entry.substr(eq + 1));
    if (const char* d = std::getenv((key + "_DECODE").c_str())) cmd.decode = d;
    if (const char* t = std::getenv((key + "_TIMEOUT_MS").c_str())) {
      cmd.timeout = std::chrono::milliseconds(std::max(1L, std::atol(t)));
    }
    if (const char* f = std::getenv((key + "_TEMPFILES").c_str())) {
      cmd.use_temp_files = std::string_view(f) == "1";
    }
    out.push_back(std::make_shared<ExternalCodec>(std::move(id), std::move(cmd)));
  }
  return out;
}

}  // namespace medroi::codec::external
