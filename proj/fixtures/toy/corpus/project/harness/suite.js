"use strict";

// Loads every src/*Test.js file and runs the registered tests in order.
const fs = require("fs");
const path = require("path");

function loadSuite(workspace) {
  const kit = require(path.join(workspace, "harness", "testkit.js"));
  const srcDir = path.join(workspace, "src");
  const files = fs.readdirSync(srcDir).filter((f) => f.endsWith("Test.js")).sort();
  for (const f of files) {
    require(path.join(srcDir, f));
  }
  return kit.registered;
}

function runSuite(tests) {
  const failed = [];
  for (const t of tests) {
    try {
      t.fn();
    } catch (err) {
      failed.push(t.name);
      process.stderr.write(t.name + ": " + err.message + "\n");
    }
  }
  return failed;
}

module.exports = { loadSuite, runSuite };
