/*
 * Copyright (C) 2026 The irsplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/


#include <irsplan/conic.hpp>

#include <irsplan/error.hpp>
#include <irsplan/textio.hpp>

#include <sstream>

namespace irsplan {

int ConeDims::total() const
{
  int n = linear;
  for (int s : soc)
    n += s;
  return n;
}

void ConicProblem::validate() const
{
  const auto n = c.size();
  auto fail = [](const std::string& what)
    {
      throw Error(ErrorKind::Assembly, what);
    };
  if (n == 0)
    fail("problem has no variables");
  if (A.cols() != n && A.rows() > 0)
    fail("A has " + std::to_string(A.cols()) + " columns, expected "
        + std::to_string(n));
  if (A.rows() != b.size())
    fail("A and b row counts differ");
  if (G.cols() != n)
    fail("G has " + std::to_string(G.cols()) + " columns, expected "
        + std::to_string(n));
  if (G.rows() != h.size())
    fail("G and h row counts differ");
  if (dims.linear < 0)
    fail("negative linear cone dimension");
  for (int s : dims.soc)
  {
    if (s < 1)
      fail("second-order cone of dimension " + std::to_string(s));
  }
  if (dims.total() != G.rows())
    fail("cone dimensions sum to " + std::to_string(dims.total())
        + " but G has " + std::to_string(G.rows()) + " rows");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite() || !G.allFinite()
    || !h.allFinite() || !std::isfinite(c0))
    fail("non-finite problem data");
}

std::string to_cbf(const ConicProblem& p)
{
  p.validate();
  std::ostringstream out;
  const auto n = p.c.size();
  out << "VER\n3\n\nOBJSENSE\nMIN\n\nVAR\n" << n << " 1\nF " << n << "\n\n";

  int domains = (p.dims.linear > 0 ? 1 : 0) + static_cast<int>(p.dims.soc.size())
    + (p.A.rows() > 0 ? 1 : 0);
  out << "CON\n" << p.G.rows() + p.A.rows() << ' ' << domains << '\n';
  if (p.dims.linear > 0)
    out << "L+ " << p.dims.linear << '\n';
  for (int s : p.dims.soc)
    out << "Q " << s << '\n';
  if (p.A.rows() > 0)
    out << "L= " << p.A.rows() << '\n';
  out << '\n';

  std::vector<std::string> obj;
  for (Eigen::Index j = 0; j < n; ++j)
    if (p.c[j] != 0.0)
      obj.push_back(std::to_string(j) + ' ' + format_double(p.c[j]));
  out << "OBJACOORD\n" << obj.size() << '\n';
  for (const auto& line : obj)
    out << line << '\n';
  out << "\nOBJBCOORD\n" << format_double(p.c0) << "\n\n";

  std::vector<std::string> acoord;
  std::vector<std::string> bcoord;
  for (Eigen::Index i = 0; i < p.G.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < n; ++j)
      if (p.G(i, j) != 0.0)
        acoord.push_back(std::to_string(i) + ' ' + std::to_string(j) + ' '
          + format_double(-p.G(i, j)));
    if (p.h[i] != 0.0)
      bcoord.push_back(std::to_string(i) + ' ' + format_double(p.h[i]));
  }
  for (Eigen::Index i = 0; i < p.A.rows(); ++i)
  {
    const auto row = p.G.rows() + i;
    for (Eigen::Index j = 0; j < n; ++j)
      if (p.A(i, j) != 0.0)
        acoord.push_back(std::to_string(row) + ' ' + std::to_string(j) + ' '
          + format_double(p.A(i, j)));
    if (p.b[i] != 0.0)
      bcoord.push_back(std::to_string(row) + ' ' + format_double(-p.b[i]));
  }
  out << "ACOORD\n" << acoord.size() << '\n';
  for (const auto& line : acoord)
    out << line << '\n';
  out << "\nBCOORD\n" << bcoord.size() << '\n';
  for (const auto& line : bcoord)
    out << line << '\n';
  return out.str();
}

namespace {

class Tokens
{
public:
  explicit Tokens(const std::string& text)
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
    {
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.empty() || line[0] == '#')
        continue;
      _lines.push_back(line);
    }
  }

  bool done() const { return _pos >= _lines.size(); }

  std::vector<std::string> next(const char* what)
  {
    if (done())
      throw Error(ErrorKind::Parse, std::string("CBF: truncated while reading ") + what);
    std::vector<std::string> fields;
    std::istringstream in(_lines[_pos++]);
    std::string f;
    while (in >> f)
      fields.push_back(f);
    return fields;
  }

private:
  std::vector<std::string> _lines;
  std::size_t _pos = 0;
};

int to_int(const std::string& s, const char* what)
{
  return static_cast<int>(parse_int(s, what));
}

} // namespace

ConicProblem parse_cbf(const std::string& text)
{
  Tokens tok(text);
  ConicProblem p;
  int n = -1;
  int rows = 0;
  struct Domain { std::string kind; int size; };
  std::vector<Domain> domains;
  std::vector<std::tuple<int, int, double>> acoord;
  std::vector<std::pair<int, double>> bcoord;
  std::vector<std::pair<int, double>> obj;

  while (!tok.done())
  {
    const auto head = tok.next("section");
    const std::string& key = head.at(0);
    if (key == "VER")
    {
      const auto v = tok.next("VER");
      if (v.at(0) != "3")
        throw Error(ErrorKind::UnsupportedVersion, "CBF version " + v.at(0));
    }
    else if (key == "OBJSENSE")
    {
      if (tok.next("OBJSENSE").at(0) != "MIN")
        throw Error(ErrorKind::Parse, "CBF: only MIN objectives are supported");
    }
    else if (key == "VAR")
    {
      const auto d = tok.next("VAR");
      n = to_int(d.at(0), "VAR count");
      const int blocks = to_int(d.at(1), "VAR blocks");
      for (int i = 0; i < blocks; ++i)
        if (tok.next("VAR domain").at(0) != "F")
          throw Error(ErrorKind::Parse, "CBF: only free variables are supported");
    }
    else if (key == "CON")
    {
      const auto d = tok.next("CON");
      rows = to_int(d.at(0), "CON rows");
      const int blocks = to_int(d.at(1), "CON blocks");
      for (int i = 0; i < blocks; ++i)
      {
        const auto dom = tok.next("CON domain");
        domains.push_back({dom.at(0), to_int(dom.at(1), "CON domain size")});
      }
    }
    else if (key == "OBJACOORD" || key == "OBJBCOORD" || key == "ACOORD"
      || key == "BCOORD")
    {
      if (key == "OBJBCOORD")
      {
        p.c0 = parse_double(tok.next("OBJBCOORD").at(0), "OBJBCOORD");
        continue;
      }
      const int count = to_int(tok.next(key.c_str()).at(0), "entry count");
      for (int i = 0; i < count; ++i)
      {
        const auto e = tok.next(key.c_str());
        if (key == "OBJACOORD")
          obj.emplace_back(to_int(e.at(0), "index"), parse_double(e.at(1), "value"));
        else if (key == "ACOORD")
          acoord.emplace_back(to_int(e.at(0), "row"), to_int(e.at(1), "column"),
            parse_double(e.at(2), "value"));
        else
          bcoord.emplace_back(to_int(e.at(0), "row"), parse_double(e.at(1), "value"));
      }
    }
    else
    {
      throw Error(ErrorKind::Parse, "CBF: unsupported section " + key);
    }
  }

  if (n <= 0)
    throw Error(ErrorKind::Parse, "CBF: missing VAR section");

  // Domains must be ordered L+, Q..., L= (as written by to_cbf).
  int cone_rows = 0;
  int eq_rows = 0;
  for (const auto& d : domains)
  {
    if (d.kind == "L+")
    {
      if (eq_rows > 0 || !p.dims.soc.empty() || p.dims.linear > 0)
        throw Error(ErrorKind::Parse, "CBF: unsupported domain order");
      p.dims.linear = d.size;
      cone_rows += d.size;
    }
    else if (d.kind == "Q")
    {
      if (eq_rows > 0)
        throw Error(ErrorKind::Parse, "CBF: unsupported domain order");
      p.dims.soc.push_back(d.size);
      cone_rows += d.size;
    }
    else if (d.kind == "L=")
    {
      eq_rows += d.size;
    }
    else
    {
      throw Error(ErrorKind::Parse, "CBF: unsupported domain " + d.kind);
    }
  }
  if (cone_rows + eq_rows != rows)
    throw Error(ErrorKind::Parse, "CBF: domain sizes do not match CON rows");

  p.c = Eigen::VectorXd::Zero(n);
  p.G = Eigen::MatrixXd::Zero(cone_rows, n);
  p.h = Eigen::VectorXd::Zero(cone_rows);
  p.A = Eigen::MatrixXd::Zero(eq_rows, n);
  p.b = Eigen::VectorXd::Zero(eq_rows);
  for (const auto& [j, v] : obj)
    p.c[j] = v;
  for (const auto& [i, j, v] : acoord)
  {
    if (i < 0 || i >= rows || j < 0 || j >= n)
      throw Error(ErrorKind::Parse, "CBF: ACOORD index out of range");
    if (i < cone_rows)
      p.G(i, j) = -v;
    else
      p.A(i - cone_rows, j) = v;
  }
  for (const auto& [i, v] : bcoord)
  {
    if (i < 0 || i >= rows)
      throw Error(ErrorKind::Parse, "CBF: BCOORD index out of range");
    if (i < cone_rows)
      p.h[i] = v;
    else
      p.b[i - cone_rows] = -v;
  }
  p.validate();
  return p;
}

} // namespace irsplan
