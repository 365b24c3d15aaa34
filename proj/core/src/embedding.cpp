#include "kred/embedding.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace kred {

namespace {

bool site_matches(const LinkedGraph& p, int pa, int ps, const LinkedGraph& t, int ta,
                  std::vector<int>& image, std::vector<int>& stack, std::vector<int>& assigned) {
  const Site& want = p.agents[pa].sites[ps];
  const Site* have = t.agents[ta].find(want.name);
  if (!have) return false;
  if (want.internal && have->internal != want.internal) return false;
  int ts = static_cast<int>(have - t.agents[ta].sites.data());
  const auto& tp = t.partner[ta][ts];
  switch (want.binding.kind) {
    case Binding::Kind::Free:
      return have->binding.is_free();
    case Binding::Kind::Wildcard:
      return have->binding.is_bound() || have->binding.is_wildcard();
    case Binding::Kind::Bound: {
      const auto& pp = p.partner[pa][ps];
      if (!pp) return have->binding.is_bound() || have->binding.is_wildcard();
      if (!tp) return false;
      if (t.agents[tp->agent].sites[tp->site].name != p.agents[pp->agent].sites[pp->site].name) {
        return false;
      }
      if (t.agents[tp->agent].name != p.agents[pp->agent].name) return false;
      int& slot = image[pp->agent];
      if (slot == -1) {
        slot = tp->agent;
        stack.push_back(pp->agent);
        assigned.push_back(pp->agent);
        return true;
      }
      return slot == tp->agent;
    }
  }
  return false;
}

// Extends `image` from pattern agent `root` mapped to target agent `target`
// by following bonds. Every pattern agent given an image is appended to
// `assigned`, also on failure.
bool propagate(const LinkedGraph& p, const LinkedGraph& t, int root, int target,
               std::vector<int>& image, std::vector<int>& assigned) {
  if (p.agents[root].name != t.agents[target].name) return false;
  image[root] = target;
  std::vector<int> stack{root};
  assigned.push_back(root);
  while (!stack.empty()) {
    int pa = stack.back();
    stack.pop_back();
    int ta = image[pa];
    if (p.agents[pa].name != t.agents[ta].name) return false;
    for (std::size_t s = 0; s < p.agents[pa].sites.size(); ++s) {
      if (!site_matches(p, pa, static_cast<int>(s), t, ta, image, stack, assigned)) return false;
    }
  }
  return true;
}

std::vector<int> component_roots(const LinkedGraph& p) {
  std::vector<int> comp(p.size(), -1);
  std::vector<int> roots;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (comp[a] != -1) continue;
    roots.push_back(static_cast<int>(a));
    std::vector<int> stack{static_cast<int>(a)};
    comp[a] = static_cast<int>(roots.size());
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (const auto& q : p.partner[x]) {
        if (q && comp[q->agent] == -1) {
          comp[q->agent] = comp[a];
          stack.push_back(q->agent);
        }
      }
    }
  }
  return roots;
}

void search(const LinkedGraph& p, const LinkedGraph& t, bool first_only,
            std::vector<Embedding>& out) {
  auto roots = component_roots(p);
  std::vector<int> image(p.size(), -1);
  std::vector<bool> used(t.size(), false);
  std::function<bool(std::size_t)> step = [&](std::size_t c) -> bool {
    if (c == roots.size()) {
      out.push_back({image});
      return first_only;
    }
    for (std::size_t ta = 0; ta < t.size(); ++ta) {
      if (used[ta]) continue;
      std::vector<int> assigned;
      bool ok = propagate(p, t, roots[c], static_cast<int>(ta), image, assigned);
      if (ok) {
        std::vector<int> hit;
        for (int pa : assigned) {
          if (used[image[pa]]) {
            ok = false;
            break;
          }
          used[image[pa]] = true;
          hit.push_back(image[pa]);
        }
        if (ok && step(c + 1)) return true;
        for (int x : hit) used[x] = false;
      }
      for (int pa : assigned) image[pa] = -1;
      image[roots[c]] = -1;
    }
    return false;
  };
  step(0);
}

}  // namespace

std::vector<Embedding> embeddings(const LinkedGraph& pattern, const LinkedGraph& target) {
  std::vector<Embedding> out;
  if (pattern.size() > target.size()) return out;
  search(pattern, target, false, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Embedding> embeddings(const Expression& pattern, const Expression& target) {
  return embeddings(link(pattern), link(target));
}

bool embeds(const LinkedGraph& pattern, const LinkedGraph& target) {
  if (pattern.size() > target.size()) return false;
  std::vector<Embedding> out;
  search(pattern, target, true, out);
  return !out.empty();
}

}  // namespace kred
