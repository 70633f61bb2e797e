#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "advtrust/errors.hpp"

namespace advtrust {

/// Round-trip-exact deterministic formatting for report files.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_float(float v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

/// Buffered text-file writer that lands atomically: content goes to a .tmp
/// sibling and is renamed into place on commit, so failures never leave a
/// partial report behind.
class AtomicFileWriter {
public:
    explicit AtomicFileWriter(std::string path) : path_(std::move(path)) {}

    AtomicFileWriter& operator<<(const std::string& s) {
        buffer_ += s;
        return *this;
    }
    AtomicFileWriter& operator<<(const char* s) {
        buffer_ += s;
        return *this;
    }

    void row_end() { buffer_ += '\n'; }

    void commit() {
        std::string tmp = path_ + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw FileError("cannot write " + tmp);
            f.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
            if (!f) throw FileError("short write to " + tmp);
        }
        std::filesystem::rename(tmp, path_);
    }

private:
    std::string path_;
    std::string buffer_;
};

}  // namespace advtrust
