// SPDX-License-Identifier: Apache-2.0
//
// pilotforge: joint pilot and analog combiner design for multi-cell massive MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pilotforge/archive.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pilotforge/errors.hpp"

namespace pilotforge::archive {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void malformed(int line, const std::string& what) {
    throw Error(ErrorCode::IoError, "archive line " + std::to_string(line) + ": " + what);
}

std::string cell_name(const char* prefix, int i) { return std::string(prefix) + "/" + std::to_string(i); }

std::string pair_name(const char* prefix, int i, int j) {
    return std::string(prefix) + "/" + std::to_string(i) + "/" + std::to_string(j);
}

}  // namespace

void Archive::put(const std::string& name, const CMatrix& m) {
    for (auto& [n, existing] : matrices) {
        if (n == name) {
            existing = m;
            return;
        }
    }
    matrices.emplace_back(name, m);
}

bool Archive::has(const std::string& name) const {
    for (const auto& entry : matrices) {
        if (entry.first == name) return true;
    }
    return false;
}

const CMatrix& Archive::get(const std::string& name) const {
    for (const auto& entry : matrices) {
        if (entry.first == name) return entry.second;
    }
    throw Error(ErrorCode::IoError, "archive has no matrix '" + name + "'");
}

const std::string& Archive::attr(const std::string& key) const {
    const auto it = attrs.find(key);
    if (it == attrs.end()) {
        throw Error(ErrorCode::IoError, "archive has no attribute '" + key + "'");
    }
    return it->second;
}

int Archive::attr_int(const std::string& key) const {
    const std::string& v = attr(key);
    try {
        std::size_t used = 0;
        const int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, "attribute '" + key + "' is not an integer: " + v);
    }
}

void write(const Archive& ar, std::ostream& os) {
    os << kMagic << '\n';
    for (const auto& [k, v] : ar.attrs) {
        os << "attr " << k << ' ' << v << '\n';
    }
    for (const auto& [name, m] : ar.matrices) {
        os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (c > 0) os << ' ';
                os << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
            }
            os << '\n';
        }
    }
}

Archive read(std::istream& is) {
    Archive ar;
    std::string line;
    int lineno = 1;
    if (!std::getline(is, line) || line != kMagic) {
        malformed(lineno, "missing archive header");
    }
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "attr") {
            std::string key;
            ls >> key;
            std::string value;
            std::getline(ls >> std::ws, value);
            if (key.empty()) malformed(lineno, "attribute without key");
            ar.attrs[key] = value;
        } else if (tag == "matrix") {
            std::string name;
            long rows = -1;
            long cols = -1;
            if (!(ls >> name >> rows >> cols) || rows < 0 || cols < 0) {
                malformed(lineno, "bad matrix header");
            }
            CMatrix m(rows, cols);
            for (long r = 0; r < rows; ++r) {
                if (!std::getline(is, line)) malformed(lineno, "truncated matrix '" + name + "'");
                ++lineno;
                std::istringstream rs(line);
                for (long c = 0; c < cols; ++c) {
                    double re = 0.0;
                    double im = 0.0;
                    if (!(rs >> re >> im)) malformed(lineno, "short row in matrix '" + name + "'");
                    m(r, c) = {re, im};
                }
                std::string extra;
                if (rs >> extra) malformed(lineno, "long row in matrix '" + name + "'");
            }
            ar.put(name, m);
        } else {
            malformed(lineno, "unknown record '" + tag + "'");
        }
    }
    return ar;
}

void save(const Archive& ar, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    write(ar, os);
    os.flush();
    if (!os) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

Archive load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    return read(is);
}

Archive to_archive(const channel::CorrelationProfile& profile) {
    Archive ar;
    const int m = profile.cells();
    ar.attrs["type"] = "profile";
    ar.attrs["kind"] = channel::to_string(profile.kind());
    ar.attrs["cells"] = std::to_string(m);
    ar.attrs["users"] = std::to_string(profile.users());
    ar.attrs["antennas"] = std::to_string(profile.antennas());
    switch (profile.kind()) {
        case channel::ProfileKind::FullySeparable: {
            const auto& fs = std::get<channel::FullySeparable>(profile.variant());
            for (int i = 0; i < m; ++i) ar.put(cell_name("Q", i), fs.q[static_cast<std::size_t>(i)]);
            for (int j = 0; j < m; ++j) ar.put(cell_name("P", j), fs.p[static_cast<std::size_t>(j)]);
            break;
        }
        case channel::ProfileKind::PartiallySeparable: {
            const auto& ps = std::get<channel::PartiallySeparable>(profile.variant());
            for (int i = 0; i < m; ++i) ar.put(cell_name("Q", i), ps.q[static_cast<std::size_t>(i)]);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) ar.put(pair_name("P", i, j), ps.p[static_cast<std::size_t>(i * m + j)]);
            }
            break;
        }
        case channel::ProfileKind::MuMimo: {
            const auto& mu = std::get<channel::MuMimo>(profile.variant());
            for (int i = 0; i < m; ++i) {
                CMatrix b(mu.users, m);  // (k, j) -> beta_ikj
                for (int k = 0; k < mu.users; ++k) {
                    for (int j = 0; j < m; ++j) b(k, j) = mu(i, k, j);
                }
                ar.put(cell_name("beta", i), b);
            }
            break;
        }
    }
    return ar;
}

channel::CorrelationProfile profile_from_archive(const Archive& ar) {
    if (ar.attrs.count("type") && ar.attr("type") != "profile") {
        throw Error(ErrorCode::IoError, "archive does not hold a profile");
    }
    const std::string& kind = ar.attr("kind");
    const int m = ar.attr_int("cells");
    if (m < 1) throw Error(ErrorCode::IoError, "profile archive needs cells >= 1");
    if (kind == channel::to_string(channel::ProfileKind::FullySeparable)) {
        channel::FullySeparable fs;
        for (int i = 0; i < m; ++i) fs.q.push_back(ar.get(cell_name("Q", i)));
        for (int j = 0; j < m; ++j) fs.p.push_back(ar.get(cell_name("P", j)));
        return channel::CorrelationProfile(std::move(fs));
    }
    if (kind == channel::to_string(channel::ProfileKind::PartiallySeparable)) {
        channel::PartiallySeparable ps;
        for (int i = 0; i < m; ++i) ps.q.push_back(ar.get(cell_name("Q", i)));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) ps.p.push_back(ar.get(pair_name("P", i, j)));
        }
        return channel::CorrelationProfile(std::move(ps));
    }
    if (kind == channel::to_string(channel::ProfileKind::MuMimo)) {
        channel::MuMimo mu;
        mu.cells = m;
        mu.users = ar.attr_int("users");
        mu.antennas = ar.attr_int("antennas");
        mu.beta.assign(static_cast<std::size_t>(m * mu.users * m), 0.0);
        for (int i = 0; i < m; ++i) {
            const CMatrix& b = ar.get(cell_name("beta", i));
            if (b.rows() != mu.users || b.cols() != m) {
                throw Error(ErrorCode::IoError, "beta block has the wrong shape");
            }
            for (int k = 0; k < mu.users; ++k) {
                for (int j = 0; j < m; ++j) mu(i, k, j) = b(k, j).real();
            }
        }
        return channel::CorrelationProfile(std::move(mu));
    }
    throw Error(ErrorCode::IoError, "unknown profile kind '" + kind + "'");
}

Archive to_archive(const estimator::PilotSet& pilots) {
    Archive ar;
    ar.attrs["type"] = "pilots";
    ar.attrs["cells"] = std::to_string(pilots.cell_count());
    for (int i = 0; i < pilots.cell_count(); ++i) {
        ar.put(cell_name("S", i), pilots.cells[static_cast<std::size_t>(i)]);
    }
    return ar;
}

estimator::PilotSet pilots_from_archive(const Archive& ar) {
    if (ar.attrs.count("type") && ar.attr("type") != "pilots") {
        throw Error(ErrorCode::IoError, "archive does not hold a pilot set");
    }
    estimator::PilotSet out;
    const int m = ar.attr_int("cells");
    for (int i = 0; i < m; ++i) {
        out.cells.push_back(ar.get(cell_name("S", i)));
        if (out.cells.back().rows() != out.cells.front().rows() ||
            out.cells.back().cols() != out.cells.front().cols()) {
            throw Error(ErrorCode::IoError, "pilot blocks differ in shape");
        }
    }
    return out;
}

}  // namespace pilotforge::archive
