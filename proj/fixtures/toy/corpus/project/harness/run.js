"use strict";

// Test command: node harness/run.js <workspace>
// Writes <workspace>/test-results.txt as PASS, or FAIL followed by failing test names.
const fs = require("fs");
const path = require("path");
const { loadSuite, runSuite } = require("./suite.js");

const workspace = path.resolve(process.argv[2] || ".");
const failed = runSuite(loadSuite(workspace));
const body = failed.length === 0 ? "PASS\n" : "FAIL\n" + failed.join("\n") + "\n";
fs.writeFileSync(path.join(workspace, "test-results.txt"), body);
process.exit(failed.length === 0 ? 0 : 1);
