"use strict";

const registered = [];

function test(name, fn) {
  registered.push({ name, fn });
}

function assertEqual(actual, expected, message) {
  const a = JSON.stringify(actual);
  const e = JSON.stringify(expected);
  if (a !== e) {
    throw new Error((message || "assertEqual") + ": expected " + e + " but got " + a);
  }
}

function assertTrue(value, message) {
  if (value !== true) {
    throw new Error((message || "assertTrue") + ": got " + JSON.stringify(value));
  }
}

function assertFalse(value, message) {
  assertTrue(value === false, message || "assertFalse");
}

module.exports = { test, assertEqual, assertTrue, assertFalse, registered };
