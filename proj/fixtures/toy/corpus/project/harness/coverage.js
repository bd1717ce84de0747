"use strict";

// Coverage command: node harness/coverage.js <workspace>
// Runs the suite under V8 precise coverage and writes <workspace>/coverage.txt
// with one "path:n1,n2,..." line per class file (test files excluded).
const fs = require("fs");
const path = require("path");
const inspector = require("inspector");
const { pathToFileURL } = require("url");
const { loadSuite, runSuite } = require("./suite.js");

const workspace = path.resolve(process.argv[2] || ".");
const session = new inspector.Session();
session.connect();

function post(method, params) {
  return new Promise((resolve, reject) => {
    session.post(method, params || {}, (err, res) => (err ? reject(err) : resolve(res)));
  });
}

// A line counts when its first identifier character sits in a range with a
// non-zero count; the innermost enclosing range decides.
function coveredLines(text, functions) {
  const ranges = [];
  for (const fn of functions) {
    for (const r of fn.ranges) ranges.push(r);
  }
  const lines = text.split("\n");
  const covered = [];
  let offset = 0;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    const trimmed = line.trim();
    const col = line.search(/[A-Za-z0-9_$]/);
    const isComment = trimmed.startsWith("//") || trimmed.startsWith("/*") || trimmed.startsWith("*");
    if (col >= 0 && !isComment) {
      const at = offset + col;
      let best = null;
      for (const r of ranges) {
        if (r.startOffset <= at && at < r.endOffset) {
          if (best === null || r.endOffset - r.startOffset < best.endOffset - best.startOffset) best = r;
        }
      }
      if (best !== null && best.count > 0) covered.push(i + 1);
    }
    offset += line.length + 1;
  }
  return covered;
}

(async () => {
  await post("Profiler.enable");
  await post("Profiler.startPreciseCoverage", { callCount: true, detailed: true });
  runSuite(loadSuite(workspace));
  const { result } = await post("Profiler.takePreciseCoverage");
  await post("Profiler.stopPreciseCoverage");

  const srcDir = path.join(workspace, "src");
  const byUrl = new Map(result.map((s) => [s.url, s.functions]));
  const out = [];
  for (const f of fs.readdirSync(srcDir).sort()) {
    if (!f.endsWith(".js") || f.endsWith("Test.js")) continue;
    const file = path.join(srcDir, f);
    const functions = byUrl.get(pathToFileURL(file).href) || [];
    out.push("src/" + f + ":" + coveredLines(fs.readFileSync(file, "utf8"), functions).join(","));
  }
  fs.writeFileSync(path.join(workspace, "coverage.txt"), out.join("\n") + "\n");
})().catch((err) => {
  process.stderr.write(String(err) + "\n");
  process.exit(1);
});
