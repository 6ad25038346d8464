"""Test suite for Kindling."""