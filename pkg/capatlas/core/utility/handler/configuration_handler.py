"""
This module contains methods to read job configurations and merge them with default and enforced configurations.
"""

import os

import mergedeep
import yaml

from capatlas.core.utility.paths.basic_path import DEFAULT_JOB_PATH
from capatlas.models.exceptions import ConfigurationException


def read_configuration(log, path):
    """
    Reads yaml (or json, which is yaml) from file and returns the configuration
    @param log:
    @param path: Path to yaml file
    @return: configuration (dict)
    """
    if not os.path.isfile(path):
        log.warning("No such configuration file %s.", path)
        raise ConfigurationException(f"No such configuration file {path}.")
    with open(path, mode="r", encoding="UTF-8") as stream:
        try:
            configuration = yaml.safe_load(stream)
        except yaml.YAMLError as exc:
            log.warning("Couldn't read configuration %s: %s", path, exc)
            raise ConfigurationException(f"Couldn't read configuration {path}: {exc}") from exc
    if configuration is None:
        return {}
    if not isinstance(configuration, dict):
        raise ConfigurationException(f"Configuration {path} must be a mapping, got {type(configuration).__name__}.")
    return configuration


def find_file_in_folders(file_name, folders, log):
    """
    Searches all folders for a file with name file_name and returns the first match's path
    @param file_name: name of the file to look for
    @param folders: folders to search for file named file_name
    @param log:
    @return: path or None if not found
    """
    for folder_path in folders:
        file_path = os.path.expanduser(os.path.join(folder_path, file_name))
        if os.path.isfile(file_path):
            log.debug("File %s found in folder %s.", file_name, folder_path)
            return file_path
        log.debug("File %s not found in folder %s.", file_name, folder_path)
    return None


def load_merge_config(path, log):
    """
    @param path: path of configuration to load
    @param log:
    @return: configuration or {} if there is no such file
    """
    if not path or not os.path.isfile(path):
        return {}
    log.info(f"Merge Configurations: Found {path}")
    return read_configuration(log, path)


def merge_configurations(user_config, default_config_path, enforced_config_path, log):
    """
    Merge user, default, and enforced configurations. The packaged default job is the lowest layer.

    @param user_config: job configuration (dict)
    @param default_config_path: Path to default configuration
    @param enforced_config_path: Path to enforced configuration
    @param log:
    @return: merged configuration. Enforced overwrites all, user overwrites default.
    """
    packaged_config = load_merge_config(DEFAULT_JOB_PATH, log)
    default_config = load_merge_config(default_config_path, log)
    enforced_config = load_merge_config(enforced_config_path, log)
    return mergedeep.merge({}, packaged_config, default_config, user_config, enforced_config)
