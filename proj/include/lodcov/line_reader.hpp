#pragma once

// Reads a text file line by line, transparently inflating gzip input.
// Compression is detected from the gzip magic bytes, not the file name.

#include <zlib.h>

#include <cerrno>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <system_error>

namespace lodcov {

class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    gzipped_ = has_gzip_magic(path);
    if (gzipped_) {
      gz_ = gzopen(path.c_str(), "rb");
      if (!gz_) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
      gzbuffer(gz_, 1 << 17);
    } else {
      in_.open(path, std::ios::binary);
      if (!in_) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    }
  }

  ~LineReader() {
    if (gz_) gzclose(gz_);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool gzipped() const noexcept { return gzipped_; }

  // Reads the next line without its terminator. Returns false at EOF.
  bool next(std::string& line) {
    if (!gzipped_) {
      if (!std::getline(in_, line)) {
        if (in_.bad()) throw std::system_error(EIO, std::generic_category(), "read error in " + path_);
        return false;
      }
      return true;
    }
    line.clear();
    char buf[8192];
    while (true) {
      if (!gzgets(gz_, buf, sizeof buf)) {
        int err = 0;
        const char* msg = gzerror(gz_, &err);
        if (err != Z_OK && err != Z_BUF_ERROR)
          throw std::system_error(EIO, std::generic_category(), path_ + ": " + msg);
        return !line.empty();
      }
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
  }

  static bool has_gzip_magic(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    unsigned char magic[2] = {0, 0};
    f.read(reinterpret_cast<char*>(magic), 2);
    return f.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
  }

 private:
  std::string path_;
  bool gzipped_ = false;
  gzFile gz_ = nullptr;
  std::ifstream in_;
};

}  // namespace lodcov
