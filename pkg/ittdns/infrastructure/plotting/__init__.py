"""Plotting"""
