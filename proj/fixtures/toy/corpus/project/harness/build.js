"use strict";

// Build command: node harness/build.js <workspace>
// Compiles every source file and checks that relative requires resolve.
const fs = require("fs");
const path = require("path");
const vm = require("vm");

const workspace = path.resolve(process.argv[2] || ".");
const problems = [];

function check(file) {
  const text = fs.readFileSync(file, "utf8");
  try {
    vm.compileFunction(text, ["exports", "require", "module", "__filename", "__dirname"], { filename: file });
  } catch (err) {
    problems.push(file + ": " + err.message);
    return;
  }
  const requireRe = /require\(\s*["'](\.{1,2}\/[^"']+)["']\s*\)/g;
  let m;
  while ((m = requireRe.exec(text)) !== null) {
    let target = path.resolve(path.dirname(file), m[1]);
    if (!target.endsWith(".js")) target += ".js";
    if (!fs.existsSync(target)) {
      problems.push(file + ": cannot resolve " + m[1]);
    }
  }
}

for (const dir of ["harness", "src"]) {
  for (const f of fs.readdirSync(path.join(workspace, dir)).sort()) {
    if (f.endsWith(".js")) check(path.join(workspace, dir, f));
  }
}

if (problems.length > 0) {
  process.stderr.write(problems.join("\n") + "\n");
  process.exit(1);
}
